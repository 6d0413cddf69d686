"""Symmetric tridiagonal matrices and Sturm-sequence bisection."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels

_EPS = np.finfo(float).eps
_SAFMIN = np.finfo(float).tiny


@dataclass(frozen=True)
class SymTridiag:
    """Real symmetric tridiagonal matrix stored by its two diagonals."""

    diag: np.ndarray
    offdiag: np.ndarray
    _e2: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        d = np.ascontiguousarray(self.diag, dtype=float)
        e = np.ascontiguousarray(self.offdiag, dtype=float)
        if d.ndim != 1 or e.ndim != 1:
            raise ValueError("diag and offdiag must be one-dimensional")
        if d.size < 1:
            raise ValueError("matrix must have at least one row")
        if e.size != d.size - 1:
            raise ValueError(f"offdiag length {e.size} != n - 1 = {d.size - 1}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("matrix entries must be finite")
        d.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)
        object.__setattr__(self, "_e2", np.ascontiguousarray(e * e))

    @property
    def n(self) -> int:
        return self.diag.size

    @property
    def scale(self) -> float:
        s = float(np.max(np.abs(self.diag)))
        if self.offdiag.size:
            s = max(s, float(np.max(np.abs(self.offdiag))))
        return s

    @property
    def pivmin(self) -> float:
        # Zero pivots become +pivmin. Tied to safmin rather than eps * scale so
        # strongly graded matrices (entries spanning 1e24) keep their small
        # eigenvalues; e2 / pivmin stays finite (LAPACK dstebz convention).
        e2max = float(np.max(self._e2)) if self._e2.size else 0.0
        return _SAFMIN * max(1.0, e2max)

    def gershgorin(self) -> tuple[float, float]:
        """Interval containing the whole spectrum."""
        r = np.zeros(self.n)
        a = np.abs(self.offdiag)
        r[:-1] += a
        r[1:] += a
        lo = float(np.min(self.diag - r))
        hi = float(np.max(self.diag + r))
        pad = 2 * _EPS * max(abs(lo), abs(hi), 1.0) * self.n
        return lo - pad, hi + pad

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def count_below(m: SymTridiag, tau: float, backend: str | None = None) -> int:
    """Number of eigenvalues of ``m`` strictly below ``tau``."""
    return kernels(backend).sturm_count(m.diag, m._e2, float(tau), m.pivmin)


def count_below_many(m: SymTridiag, taus, backend: str | None = None) -> np.ndarray:
    taus = np.ascontiguousarray(taus, dtype=float)
    return kernels(backend).sturm_counts(m.diag, m._e2, taus, m.pivmin)


def eig_range(m: SymTridiag, k0: int, k1: int, tol: float, lo: float | None = None,
              hi: float | None = None, backend: str | None = None) -> np.ndarray:
    """Eigenvalues with (0-based, ascending) indices ``k0 .. k1-1``.

    Each is bracketed to absolute width ``tol`` and returned as the bracket
    midpoint. ``lo``/``hi`` may tighten the Gershgorin bracket; the caller
    guarantees ``count_below(lo) <= k0`` and ``count_below(hi) >= k1``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not 0 <= k0 <= k1 <= m.n:
        raise ValueError(f"invalid index range [{k0}, {k1}) for n={m.n}")
    if k1 == k0:
        return np.empty(0)
    glo, ghi = m.gershgorin()
    lo = glo if lo is None else max(lo, glo)
    hi = ghi if hi is None else min(hi, ghi)
    return np.asarray(kernels(backend).bisect_eigs(m.diag, m._e2, lo, hi, k0, k1, tol, m.pivmin))


def eigs_below(m: SymTridiag, tau: float, tol: float, backend: str | None = None) -> np.ndarray:
    """All eigenvalues strictly below ``tau``, ascending, with multiplicity."""
    count = count_below(m, tau, backend)
    if count == 0:
        return np.empty(0)
    glo, ghi = m.gershgorin()
    return eig_range(m, 0, count, tol, lo=glo, hi=min(float(tau), ghi), backend=backend)


def lowest_eig(m: SymTridiag, tol: float, backend: str | None = None) -> float:
    """Smallest eigenvalue.

    When ``m`` has no eigenvalue below zero the bracket starts at zero, so a
    positive semidefinite matrix never reports a negative minimum.
    """
    glo, ghi = m.gershgorin()
    lo = glo
    if count_below(m, 0.0, backend) == 0:
        lo = 0.0
        if ghi <= 0.0:
            return 0.0
    return float(eig_range(m, 0, 1, tol, lo=lo, hi=ghi, backend=backend)[0])
