"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension; a NumPy fallback
is selected at import when the compiled module is unavailable.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    extensions = []
else:
    extensions = cythonize(
        [
            Extension(
                "cs_probe._kernels._fast",
                ["src/cs_probe/_kernels/_fast.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
    for ext in extensions:
        ext.optional = True  # build failure degrades to the pure backend

setup(ext_modules=extensions)
