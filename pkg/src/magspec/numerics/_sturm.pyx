# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Sturm-sequence kernels for symmetric tridiagonal matrices.

Same contracts as :mod:`magspec.numerics._pysturm`; ``e2`` holds the squared
off-diagonal. A pivot with ``|q| <= pivmin`` is replaced by ``+pivmin`` so the
count is of eigenvalues strictly below the shift.
"""
import numpy as np

from libc.math cimport fabs


cdef Py_ssize_t _count(const double[::1] d, const double[::1] e2,
                       double tau, double pivmin) noexcept nogil:
    cdef Py_ssize_t i
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t c = 0
    cdef double q = d[0] - tau
    if fabs(q) <= pivmin:
        q = pivmin
    if q < 0:
        c += 1
    for i in range(1, n):
        q = (d[i] - tau) - e2[i - 1] / q
        if fabs(q) <= pivmin:
            q = pivmin
        if q < 0:
            c += 1
    return c


def sturm_count(const double[::1] d, const double[::1] e2, double tau, double pivmin):
    cdef Py_ssize_t c
    with nogil:
        c = _count(d, e2, tau, pivmin)
    return int(c)


def sturm_counts(const double[::1] d, const double[::1] e2, const double[::1] taus, double pivmin):
    cdef Py_ssize_t k
    cdef Py_ssize_t m = taus.shape[0]
    out = np.empty(m, dtype=np.int64)
    cdef long long[::1] o = out
    with nogil:
        for k in range(m):
            o[k] = _count(d, e2, taus[k], pivmin)
    return out


def bisect_eigs(const double[::1] d, const double[::1] e2, double lo, double hi,
                Py_ssize_t k0, Py_ssize_t k1, double tol, double pivmin):
    """Eigenvalues with indices k0..k1-1, given count(lo) <= k0 and count(hi) >= k1."""
    cdef Py_ssize_t K = k1 - k0
    cdef Py_ssize_t j, i, c
    cdef double a, b, x, prev_a = lo
    out = np.empty(K, dtype=np.float64)
    upper = np.full(K, hi, dtype=np.float64)
    cdef double[::1] o = out
    cdef double[::1] up = upper
    with nogil:
        for j in range(K):
            a = prev_a
            b = up[j]
            while b - a > tol:
                x = 0.5 * (a + b)
                if x <= a or x >= b:
                    break
                c = _count(d, e2, x, pivmin) - k0
                if c > j:
                    b = x
                    i = j + 1
                    while i < c and i < K:
                        if x < up[i]:
                            up[i] = x
                        i += 1
                else:
                    a = x
            o[j] = 0.5 * (a + b)
            prev_a = a
    return out
