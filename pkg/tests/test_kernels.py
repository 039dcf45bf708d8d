"""Backend parity: the Cython kernels must mirror the NumPy fallback."""

import numpy as np
import pytest

from cs_probe import _kernels
from cs_probe._kernels import pure

compiled = pytest.importorskip(
    "cs_probe._kernels._fast", reason="compiled kernels not built"
)

BACKENDS = [pure, compiled]


def _rng():
    return np.random.default_rng(99)


class TestCosineParity:
    def test_values_agree(self):
        rng = _rng()
        for _ in range(200):
            d = int(rng.integers(1, 60))
            u, v = rng.normal(size=(2, d))
            assert pure.cosine(u, v) == pytest.approx(compiled.cosine(u, v), abs=1e-12)

    def test_identical_fast_path_in_both(self):
        u = np.array([0.1, 0.2, 0.3])
        for backend in BACKENDS:
            assert backend.cosine(u, u.copy()) == 1.0

    def test_zero_norm_raises_in_both(self):
        z = np.zeros(3)
        u = np.ones(3)
        for backend in BACKENDS:
            with pytest.raises(ValueError):
                backend.cosine(z, u)
            with pytest.raises(ValueError):
                backend.cosines_to(np.stack([u, z]), u)

    def test_batch_matches_scalar(self):
        rng = _rng()
        X = rng.normal(size=(20, 5))
        v = rng.normal(size=5)
        for backend in BACKENDS:
            batch = backend.cosines_to(X, v)
            for i in range(20):
                assert batch[i] == pytest.approx(backend.cosine(X[i], v), abs=1e-12)

    def test_clamped_to_unit_interval(self):
        X = np.array([[2.0, 2.0], [3.0, 3.0]])
        v = np.array([1.0, 1.0])
        for backend in BACKENDS:
            out = backend.cosines_to(X, v)
            assert np.all(out <= 1.0) and np.all(out >= -1.0)


class TestMeanParity:
    def test_mean_rows_agree(self):
        rng = _rng()
        X = rng.normal(size=(13, 7))
        np.testing.assert_allclose(pure.mean_rows(X), compiled.mean_rows(X), atol=1e-12)

    def test_identical_rows_fast_path(self):
        X = np.tile([0.1, 0.2], (5, 1))
        for backend in BACKENDS:
            np.testing.assert_array_equal(backend.mean_rows(X), [0.1, 0.2])
            w = np.full(5, 0.2)
            np.testing.assert_array_equal(backend.weighted_mean_rows(X, w), [0.1, 0.2])

    def test_weighted_mean_agrees(self):
        rng = _rng()
        X = rng.normal(size=(9, 4))
        w = rng.dirichlet(np.ones(9))
        np.testing.assert_allclose(
            pure.weighted_mean_rows(X, w), compiled.weighted_mean_rows(X, w), atol=1e-12
        )


class TestGmmParity:
    def _setup(self, n=40, d=6, k=3):
        rng = _rng()
        X = rng.normal(size=(n, d))
        weights = rng.dirichlet(np.ones(k))
        means = rng.normal(size=(k, d))
        variances = rng.uniform(0.5, 2.0, size=(k, d))
        return X, weights, means, variances

    def test_e_step_agrees(self):
        X, weights, means, variances = self._setup()
        resp_p, ll_p = pure.gmm_e_step(X, weights, means, variances)
        resp_c, ll_c = compiled.gmm_e_step(X, weights, means, variances)
        np.testing.assert_allclose(resp_c, resp_p, atol=1e-9)
        assert ll_c == pytest.approx(ll_p, rel=1e-9)

    def test_m_step_agrees(self):
        X, weights, means, variances = self._setup()
        resp, _ = pure.gmm_e_step(X, weights, means, variances)
        out_p = pure.gmm_m_step(X, resp, 1e-6, means, variances)
        out_c = compiled.gmm_m_step(X, np.ascontiguousarray(resp), 1e-6, means, variances)
        for a, b in zip(out_p, out_c):
            np.testing.assert_allclose(b, a, atol=1e-9)

    def test_empty_points_in_both(self):
        _, weights, means, variances = self._setup(n=1)
        for backend in BACKENDS:
            resp, ll = backend.gmm_e_step(
                np.zeros((0, means.shape[1])), weights, means, variances
            )
            assert resp.shape == (0, len(weights))
            assert ll == 0.0


class TestDispatch:
    def test_backend_is_switchable(self):
        previous = _kernels.use_backend("pure")
        try:
            assert _kernels.BACKEND == "pure"
            assert _kernels.cosine(np.ones(2), np.ones(2)) == 1.0
        finally:
            _kernels.use_backend(previous)

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            _kernels.use_backend("fortran")

    def test_compiled_backend_is_default_when_available(self):
        assert "cython" in _kernels.available_backends()
