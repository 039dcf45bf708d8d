# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Cython implementation of the numeric kernels.

Mirrors ``pure.py`` exactly in semantics (fast paths, error cases);
see that module's docstring for the shared guarantees.
"""

from libc.math cimport exp, log, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double LOG_2PI = log(2.0 * 3.14159265358979323846)


def cosine(const double[::1] u, const double[::1] v):
    cdef Py_ssize_t i, d = u.shape[0]
    cdef double dot = 0.0, nu = 0.0, nv = 0.0
    cdef bint equal = d == v.shape[0]
    for i in range(d):
        if u[i] != v[i]:
            equal = False
            break
    if equal:
        for i in range(d):
            if u[i] != 0.0:
                return 1.0
        raise ValueError("zero-norm vector")
    for i in range(d):
        dot += u[i] * v[i]
        nu += u[i] * u[i]
        nv += v[i] * v[i]
    if nu == 0.0 or nv == 0.0:
        raise ValueError("zero-norm vector")
    cdef double c = dot / (sqrt(nu) * sqrt(nv))
    if c > 1.0:
        return 1.0
    if c < -1.0:
        return -1.0
    return c


def cosines_to(const double[:, ::1] X, const double[::1] v):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], i, j
    cdef double nv = 0.0, dot, sq, c
    cdef bint equal
    for j in range(d):
        nv += v[j] * v[j]
    if nv == 0.0:
        raise ValueError("zero-norm vector")
    nv = sqrt(nv)
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    for i in range(n):
        dot = 0.0
        sq = 0.0
        equal = True
        for j in range(d):
            dot += X[i, j] * v[j]
            sq += X[i, j] * X[i, j]
            if X[i, j] != v[j]:
                equal = False
        if sq == 0.0:
            raise ValueError("zero-norm vector")
        if equal:
            out[i] = 1.0
            continue
        c = dot / (sqrt(sq) * nv)
        if c > 1.0:
            c = 1.0
        elif c < -1.0:
            c = -1.0
        out[i] = c
    return out_arr


cdef bint _all_rows_equal(const double[:, ::1] X):
    cdef Py_ssize_t i, j
    for i in range(1, X.shape[0]):
        for j in range(X.shape[1]):
            if X[i, j] != X[0, j]:
                return False
    return True


def mean_rows(const double[:, ::1] X):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], i, j
    out_arr = np.empty(d, dtype=np.float64)
    cdef double[::1] out = out_arr
    if _all_rows_equal(X):
        for j in range(d):
            out[j] = X[0, j]
        return out_arr
    cdef double s
    for j in range(d):
        s = 0.0
        for i in range(n):
            s += X[i, j]
        out[j] = s / n
    return out_arr


def weighted_mean_rows(const double[:, ::1] X, const double[::1] w):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], i, j
    out_arr = np.empty(d, dtype=np.float64)
    cdef double[::1] out = out_arr
    if _all_rows_equal(X):
        for j in range(d):
            out[j] = X[0, j]
        return out_arr
    cdef double s
    for j in range(d):
        s = 0.0
        for i in range(n):
            s += w[i] * X[i, j]
        out[j] = s
    return out_arr


def gmm_e_step(
    const double[:, ::1] X,
    const double[::1] weights,
    const double[:, ::1] means,
    const double[:, ::1] variances,
):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], k = weights.shape[0]
    cdef Py_ssize_t i, j, c
    resp_arr = np.zeros((n, k), dtype=np.float64)
    if n == 0:
        return resp_arr, 0.0
    cdef double[:, ::1] resp = resp_arr
    logw_arr = np.empty(k, dtype=np.float64)
    logdet_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] logw = logw_arr, logdet = logdet_arr
    cdef double s, diff, quad, m, lse, total = 0.0
    for c in range(k):
        logw[c] = log(weights[c])
        s = 0.0
        for j in range(d):
            s += log(variances[c, j])
        logdet[c] = s
    logp_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] logp = logp_arr
    for i in range(n):
        m = -1e308
        for c in range(k):
            quad = 0.0
            for j in range(d):
                diff = X[i, j] - means[c, j]
                quad += diff * diff / variances[c, j]
            logp[c] = logw[c] - 0.5 * (d * LOG_2PI + logdet[c] + quad)
            if logp[c] > m:
                m = logp[c]
        s = 0.0
        for c in range(k):
            s += exp(logp[c] - m)
        lse = m + log(s)
        for c in range(k):
            resp[i, c] = exp(logp[c] - lse)
        total += lse
    return resp_arr, total


def gmm_m_step(
    const double[:, ::1] X,
    const double[:, ::1] resp,
    double var_floor,
    const double[:, ::1] prev_means,
    const double[:, ::1] prev_vars,
):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], k = resp.shape[1]
    cdef Py_ssize_t i, j, c
    weights_arr = np.empty(k, dtype=np.float64)
    means_arr = np.empty((k, d), dtype=np.float64)
    vars_arr = np.empty((k, d), dtype=np.float64)
    cdef double[::1] weights = weights_arr
    cdef double[:, ::1] means = means_arr, variances = vars_arr
    cdef double nk, s, dev
    for c in range(k):
        nk = 0.0
        for i in range(n):
            nk += resp[i, c]
        weights[c] = nk / n
        if nk == 0.0:
            for j in range(d):
                means[c, j] = prev_means[c, j]
                variances[c, j] = prev_vars[c, j]
            continue
        for j in range(d):
            s = 0.0
            for i in range(n):
                s += resp[i, c] * X[i, j]
            means[c, j] = s / nk
        for j in range(d):
            s = 0.0
            for i in range(n):
                dev = X[i, j] - means[c, j]
                s += resp[i, c] * dev * dev
            variances[c, j] = s / nk
    for c in range(k):
        for j in range(d):
            if variances[c, j] < var_floor:
                variances[c, j] = var_floor
    return weights_arr, means_arr, vars_arr
