"""Bracketed bisection for monotone scalar functions."""
from __future__ import annotations

from typing import Callable

import numpy as np


def bisect_increasing(f: Callable[[np.ndarray], np.ndarray], targets, lo: float, hi: float,
                      xtol: float = 1e-12, max_iter: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Solve ``f(x) = t`` for every target of an increasing vectorised ``f``.

    Each root is assumed to lie in ``[lo, hi]``. Returns the final brackets
    ``(left, right)`` with ``f(left) <= t <= f(right)`` and
    ``right - left <= xtol``, so callers choose the side that keeps a
    one-sided inequality exact.
    """
    t = np.atleast_1d(np.asarray(targets, dtype=float))
    left = np.full(t.shape, float(lo))
    right = np.full(t.shape, float(hi))
    for _ in range(max_iter):
        mid = 0.5 * (left + right)
        active = (right - left > xtol) & (mid > left) & (mid < right)
        if not active.any():
            break
        fm = f(mid[active])
        up = fm >= t[active]
        ia = np.flatnonzero(active)
        right[ia[up]] = mid[active][up]
        left[ia[~up]] = mid[active][~up]
    return left, right
