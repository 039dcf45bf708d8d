"""Diagonal-covariance Gaussian mixture fitted by expectation-maximization.

Written from scratch rather than wrapping a library fit: the candidate
sets clustered here are tiny (tens of points in 50 dimensions), where
full-covariance estimates go singular and library defaults are neither
deterministic nor order-stable.  Design choices:

* diagonal covariances with a variance floor (default 1e-6);
* farthest-point initialization: the first center is a seeded random
  point (or ``start_index``), each further center the point maximizing
  the minimum Euclidean distance to the chosen ones;
* convergence when the log-likelihood improves by less than
  ``tol * max(1, |previous|)``, i.e. a relative tolerance;
* identical (points, seed) input is bitwise reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from cs_probe import _kernels
from cs_probe.errors import InsufficientPointsError, InvalidInputError


@dataclass(frozen=True)
class MixtureModel:
    n_components: int
    weights: np.ndarray          # (k,), sums to 1
    means: np.ndarray            # (k, d)
    variances: np.ndarray        # (k, d), every entry >= var_floor
    log_likelihood: float
    seed: int
    iterations: int
    converged: bool
    ll_path: tuple[float, ...]   # log-likelihood after init and each EM step

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def dumps(self) -> str:
        """Deterministic JSON dump for golden-file comparisons."""
        payload = {
            "n_components": self.n_components,
            "weights": [repr(float(x)) for x in self.weights],
            "means": [[repr(float(x)) for x in row] for row in self.means],
            "variances": [[repr(float(x)) for x in row] for row in self.variances],
            "log_likelihood": repr(float(self.log_likelihood)),
            "seed": self.seed,
            "iterations": self.iterations,
            "converged": self.converged,
        }
        return json.dumps(payload, sort_keys=True, indent=1)

    @classmethod
    def loads(cls, text: str) -> "MixtureModel":
        d = json.loads(text)
        return cls(
            n_components=d["n_components"],
            weights=np.array([float(x) for x in d["weights"]]),
            means=np.array([[float(x) for x in row] for row in d["means"]]),
            variances=np.array([[float(x) for x in row] for row in d["variances"]]),
            log_likelihood=float(d["log_likelihood"]),
            seed=d["seed"],
            iterations=d["iterations"],
            converged=d["converged"],
            ll_path=(),
        )


@dataclass(frozen=True)
class HardAssignment:
    labels: np.ndarray           # (n,) component indices
    responsibilities: np.ndarray  # (n, k), rows sum to 1


def _as_points(points, dim: int | None = None) -> np.ndarray:
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidInputError(f"points must be a set of vectors, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError("points contain non-finite values")
    if dim is not None and X.shape[1] != dim:
        raise InvalidInputError(f"points have dimension {X.shape[1]}, model expects {dim}")
    return np.ascontiguousarray(X)


def _farthest_point_centers(X: np.ndarray, k: int, start: int) -> np.ndarray:
    centers = [X[start]]
    # squared distance of every point to its nearest chosen center
    min_d2 = np.sum((X - X[start]) ** 2, axis=1)
    for _ in range(1, k):
        idx = int(np.argmax(min_d2))  # first max wins on ties
        centers.append(X[idx])
        d2 = np.sum((X - X[idx]) ** 2, axis=1)
        np.minimum(min_d2, d2, out=min_d2)
    return np.stack(centers)


def _fit_once(
    X: np.ndarray,
    k: int,
    start: int,
    max_iter: int,
    tol: float,
    var_floor: float,
):
    n, d = X.shape
    means = _farthest_point_centers(X, k, start)
    weights = np.full(k, 1.0 / k)
    base_var = np.maximum(X.var(axis=0), var_floor)
    variances = np.tile(base_var, (k, 1))

    resp, ll = _kernels.gmm_e_step(X, weights, means, variances)
    ll_path = [ll]
    converged = False
    iterations = 0
    for _ in range(max_iter):
        weights, means, variances = _kernels.gmm_m_step(
            X, resp, var_floor, means, variances
        )
        resp, ll = _kernels.gmm_e_step(X, weights, means, variances)
        iterations += 1
        prev = ll_path[-1]
        ll_path.append(ll)
        if abs(ll - prev) <= tol * max(1.0, abs(prev)):
            converged = True
            break
    return weights, means, variances, ll, iterations, converged, ll_path


def fit_gmm(
    points,
    n_components: int = 2,
    seed: int = 0,
    max_iter: int = 200,
    tol: float = 1e-6,
    var_floor: float = 1e-6,
    restarts: int = 1,
    start_index: int | None = None,
) -> MixtureModel:
    """Fit a diagonal-covariance Gaussian mixture by EM.

    ``start_index`` fixes the first initialization center to a specific
    point, making the fit independent of point order (up to float
    summation); by default the start is drawn from the seeded RNG and
    each restart draws a fresh one.  The best restart by final
    log-likelihood wins.
    """
    if n_components < 1:
        raise InvalidInputError(f"n_components must be >= 1, got {n_components}")
    if max_iter < 1 or tol <= 0 or var_floor <= 0 or restarts < 1:
        raise InvalidInputError("max_iter, tol, var_floor and restarts must be positive")
    X = _as_points(points)
    n = X.shape[0]
    if n < n_components:
        raise InsufficientPointsError(
            f"{n} points cannot support {n_components} components"
        )
    rng = np.random.default_rng(seed)
    if start_index is not None:
        if not 0 <= start_index < n:
            raise InvalidInputError(f"start_index {start_index} out of range")
        starts = [int(start_index)]
    else:
        starts = [int(rng.integers(n)) for _ in range(restarts)]

    best = None
    for start in starts:
        fit = _fit_once(X, n_components, start, max_iter, tol, var_floor)
        if best is None or fit[3] > best[3]:
            best = fit
    weights, means, variances, ll, iterations, converged, ll_path = best
    return MixtureModel(
        n_components=n_components,
        weights=weights,
        means=means,
        variances=variances,
        log_likelihood=ll,
        seed=seed,
        iterations=iterations,
        converged=converged,
        ll_path=tuple(ll_path),
    )


def assign(model: MixtureModel, points) -> HardAssignment:
    """Posterior responsibilities and argmax labels under the model.

    Ties go to the lower component index; an empty point list yields an
    empty assignment.
    """
    X = _as_points(points, dim=model.dim) if len(points) else np.zeros((0, model.dim))
    resp, _ = _kernels.gmm_e_step(X, model.weights, model.means, model.variances)
    labels = (
        resp.argmax(axis=1).astype(np.int64)
        if resp.shape[0]
        else np.zeros(0, dtype=np.int64)
    )
    return HardAssignment(labels=labels, responsibilities=resp)


def log_likelihood(model: MixtureModel, points) -> float:
    """Total log density of the points under the mixture."""
    X = _as_points(points, dim=model.dim)
    _, ll = _kernels.gmm_e_step(X, model.weights, model.means, model.variances)
    return ll
