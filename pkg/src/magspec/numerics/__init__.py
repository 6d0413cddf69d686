"""Numerical kernels: quadrature, monotone root bracketing, tridiagonal eigensolver."""
from ._backend import BACKENDS, active_backend, set_backend
from .quadrature import gk15, integrate
from .roots import bisect_increasing
from .tridiag import SymTridiag, count_below, count_below_many, eig_range, eigs_below, lowest_eig

__all__ = [
    "BACKENDS",
    "SymTridiag",
    "active_backend",
    "bisect_increasing",
    "count_below",
    "count_below_many",
    "eig_range",
    "eigs_below",
    "gk15",
    "integrate",
    "lowest_eig",
    "set_backend",
]
