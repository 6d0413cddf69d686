"""Pure-Python Sturm kernels, used when the compiled extension is absent.

The multi-shift routines vectorise over shifts so bisection advances every
requested eigenvalue at once; the recurrence over matrix rows stays a loop.
"""
from __future__ import annotations

import numpy as np


def sturm_count(d, e2, tau: float, pivmin: float) -> int:
    dl = d.tolist()
    el = e2.tolist()
    q = dl[0] - tau
    if abs(q) <= pivmin:
        q = pivmin
    c = 1 if q < 0 else 0
    for i in range(1, len(dl)):
        q = (dl[i] - tau) - el[i - 1] / q
        if abs(q) <= pivmin:
            q = pivmin
        if q < 0:
            c += 1
    return c


def sturm_counts(d, e2, taus, pivmin: float) -> np.ndarray:
    taus = np.asarray(taus, dtype=float)
    q = d[0] - taus
    q[np.abs(q) <= pivmin] = pivmin
    c = (q < 0).astype(np.int64)
    for i in range(1, d.shape[0]):
        q = (d[i] - taus) - e2[i - 1] / q
        q[np.abs(q) <= pivmin] = pivmin
        c += q < 0
    return c


def bisect_eigs(d, e2, lo: float, hi: float, k0: int, k1: int, tol: float, pivmin: float) -> np.ndarray:
    K = k1 - k0
    a = np.full(K, lo, dtype=float)
    b = np.full(K, hi, dtype=float)
    idx = np.arange(K)
    while True:
        x = 0.5 * (a + b)
        active = (b - a > tol) & (x > a) & (x < b)
        if not active.any():
            break
        c = sturm_counts(d, e2, x[active], pivmin) - k0
        below = c > idx[active]
        xa = x[active]
        ia = np.flatnonzero(active)
        b[ia[below]] = xa[below]
        a[ia[~below]] = xa[~below]
    return 0.5 * (a + b)
