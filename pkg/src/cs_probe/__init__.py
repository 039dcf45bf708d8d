"""cs-probe: quantify a masked LM's common-sense ability via cloze tests.

Two measurement families over a shared word-embedding space:

* dispersion - accuracy (similarity of the LM's replacements to the
  masked word) and precision (their similarity to each other), plus
  probability-weighted variants;
* confidence - a cluster-weighted score for two-choice sense validation,
  built on a from-scratch EM Gaussian mixture over candidate embeddings.

The LM sits behind a candidate-provider boundary (fixture files or an
HTTP fill-mask endpoint); see :mod:`cs_probe.gateway`.
"""

from cs_probe._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
