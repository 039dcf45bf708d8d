"""NumPy implementation of the numeric kernels.

This is the reference backend; ``_fast`` (Cython) mirrors it operation
for operation.  Both backends share the exactness guarantees the metric
layer relies on:

* ``cosine`` returns exactly 1.0 for componentwise-identical vectors and
  clamps rounding spill to [-1, 1];
* ``mean_rows`` / ``weighted_mean_rows`` return the common row exactly
  when all rows are identical;
* zero-norm vectors raise ``ValueError`` instead of propagating NaN.

Cross-backend results may differ by float-summation order (< 1e-12 in
practice); within one backend results are bitwise deterministic.
"""

import math

import numpy as np

LOG_2PI = math.log(2.0 * math.pi)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    if np.array_equal(u, v):
        if not np.any(u):
            raise ValueError("zero-norm vector")
        return 1.0
    nu = math.sqrt(float(np.dot(u, u)))
    nv = math.sqrt(float(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("zero-norm vector")
    c = float(np.dot(u, v)) / (nu * nv)
    return min(1.0, max(-1.0, c))


def cosines_to(X: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Cosine similarity of every row of ``X`` against ``v``."""
    nv = math.sqrt(float(np.dot(v, v)))
    sq = np.einsum("ij,ij->i", X, X)
    if nv == 0.0 or np.any(sq == 0.0):
        raise ValueError("zero-norm vector")
    out = (X @ v) / (np.sqrt(sq) * nv)
    np.clip(out, -1.0, 1.0, out=out)
    out[np.all(X == v, axis=1)] = 1.0
    return out


def mean_rows(X: np.ndarray) -> np.ndarray:
    if np.all(X == X[0]):
        return X[0].copy()
    return X.mean(axis=0)


def weighted_mean_rows(X: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Weighted mean of rows; ``w`` is assumed normalized to sum 1."""
    if np.all(X == X[0]):
        return X[0].copy()
    return w @ X


def gmm_e_step(
    X: np.ndarray,
    weights: np.ndarray,
    means: np.ndarray,
    variances: np.ndarray,
) -> tuple[np.ndarray, float]:
    """Posterior responsibilities and total log-likelihood.

    Diagonal-covariance Gaussian mixture, evaluated in log space with
    log-sum-exp so far-away points underflow to responsibility 0 rather
    than NaN.
    """
    n, d = X.shape
    if n == 0:
        return np.zeros((0, weights.shape[0])), 0.0
    diff = X[:, None, :] - means[None, :, :]
    quad = np.sum(diff * diff / variances[None, :, :], axis=2)
    logdet = np.sum(np.log(variances), axis=1)
    logp = np.log(weights)[None, :] - 0.5 * (d * LOG_2PI + logdet[None, :] + quad)
    m = logp.max(axis=1, keepdims=True)
    lse = m + np.log(np.sum(np.exp(logp - m), axis=1, keepdims=True))
    resp = np.exp(logp - lse)
    return resp, float(lse.sum())


def gmm_m_step(
    X: np.ndarray,
    resp: np.ndarray,
    var_floor: float,
    prev_means: np.ndarray,
    prev_vars: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Maximum-likelihood update of (weights, means, diagonal variances).

    A component whose responsibility mass underflows to zero keeps its
    previous parameters instead of dividing by zero.
    """
    n = X.shape[0]
    k = resp.shape[1]
    nk = resp.sum(axis=0)
    weights = nk / n
    means = np.empty_like(prev_means)
    variances = np.empty_like(prev_vars)
    for j in range(k):
        if nk[j] == 0.0:
            means[j] = prev_means[j]
            variances[j] = prev_vars[j]
            continue
        means[j] = (resp[:, j] @ X) / nk[j]
        dev = X - means[j]
        variances[j] = (resp[:, j] @ (dev * dev)) / nk[j]
    np.maximum(variances, var_floor, out=variances)
    return weights, means, variances
