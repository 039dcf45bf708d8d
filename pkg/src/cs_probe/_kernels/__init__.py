"""Numeric kernel backends.

The compiled Cython backend is preferred; the NumPy backend is the
drop-in fallback.  ``CS_PROBE_KERNELS=pure|cython`` forces a choice at
import time, and :func:`use_backend` swaps at runtime (used by tests and
the benchmark).
"""

import os

from cs_probe._kernels import pure as _pure

try:
    from cs_probe._kernels import _fast as _compiled
except ImportError:
    _compiled = None

_BACKENDS = {"pure": _pure}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def _resolve(name: str):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {available_backends()}"
        ) from None


_forced = os.environ.get("CS_PROBE_KERNELS")
if _forced:
    _impl = _resolve(_forced)
    BACKEND = _forced
else:
    BACKEND = "cython" if _compiled is not None else "pure"
    _impl = _BACKENDS[BACKEND]


def use_backend(name: str) -> str:
    """Switch the active backend; returns the previous backend name."""
    global _impl, BACKEND
    previous = BACKEND
    _impl = _resolve(name)
    BACKEND = name
    return previous


def cosine(u, v) -> float:
    return _impl.cosine(u, v)


def cosines_to(X, v):
    return _impl.cosines_to(X, v)


def mean_rows(X):
    return _impl.mean_rows(X)


def weighted_mean_rows(X, w):
    return _impl.weighted_mean_rows(X, w)


def gmm_e_step(X, weights, means, variances):
    return _impl.gmm_e_step(X, weights, means, variances)


def gmm_m_step(X, resp, var_floor, prev_means, prev_vars):
    return _impl.gmm_m_step(X, resp, var_floor, prev_means, prev_vars)
