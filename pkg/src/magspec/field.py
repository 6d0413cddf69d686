"""Radial magnetic field ``B(r) = M / (1 - r)**alpha + g(r)`` and its flux.

Only the flux ``Phi(r) = int_0^r s B(s) ds`` enters the channel operators, so
the vector potential itself is never formed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, InvalidFieldSpec, NonPositive
from .numerics import bisect_increasing

LEMMA_SAFETY = 0.99


@dataclass(frozen=True)
class GProfile:
    """Bounded radial correction ``g`` to the singular field.

    ``kind`` is ``"constant"`` (``values = [c]``), ``"polynomial"``
    (ascending coefficients in ``r``) or ``"piecewise"`` (``values[k]`` on
    ``[breaks[k-1], breaks[k])`` with implicit outer breaks 0 and 1).
    """

    kind: str = "constant"
    values: tuple[float, ...] = (0.0,)
    breaks: tuple[float, ...] = ()

    def __post_init__(self):
        vals = tuple(float(v) for v in np.atleast_1d(self.values))
        brks = tuple(float(b) for b in self.breaks)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "breaks", brks)
        if not all(math.isfinite(v) for v in vals) or not vals:
            raise InvalidFieldSpec("g.values must be a non-empty list of finite numbers")
        if self.kind == "constant":
            if len(vals) != 1 or brks:
                raise InvalidFieldSpec("g.kind=constant takes exactly one value and no breaks")
        elif self.kind == "polynomial":
            if brks:
                raise InvalidFieldSpec("g.kind=polynomial takes no breaks")
        elif self.kind == "piecewise":
            if len(brks) != len(vals) - 1:
                raise InvalidFieldSpec("g.breaks must have one entry fewer than g.values")
            edges = (0.0, *brks, 1.0)
            if any(not a < b for a, b in zip(edges[:-1], edges[1:])):
                raise InvalidFieldSpec("g.breaks must increase strictly inside (0, 1)")
        else:
            raise InvalidFieldSpec(f"unknown g.kind {self.kind!r}")

    @property
    def edges(self) -> tuple[float, ...]:
        return (0.0, *self.breaks, 1.0)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "constant":
            return np.full(r.shape, self.values[0])
        if self.kind == "polynomial":
            return np.polynomial.polynomial.polyval(r, self.values)
        idx = np.searchsorted(np.asarray(self.breaks), r, side="right")
        return np.asarray(self.values)[idx]

    def moment(self, r):
        """``int_0^r s g(s) ds``, exact."""
        r = np.asarray(r, dtype=float)
        if self.kind == "constant":
            return 0.5 * self.values[0] * r * r
        if self.kind == "polynomial":
            c = np.asarray(self.values)
            shifted = np.concatenate([[0.0, 0.0], c / (np.arange(c.size) + 2.0)])
            return np.polynomial.polynomial.polyval(r, shifted)
        out = np.zeros(r.shape)
        edges = self.edges
        for v, a, b in zip(self.values, edges[:-1], edges[1:]):
            hi = np.clip(r, a, b)
            out += 0.5 * v * (hi * hi - a * a)
        return out

    def sup_abs(self) -> float:
        if self.kind == "polynomial":
            grid = np.linspace(0.0, 1.0, 4097)
            return float(np.max(np.abs(self(grid))))
        return max(abs(v) for v in self.values)


def graded_grid(n: int = 4096, depth: float = 40.0) -> np.ndarray:
    """Points in ``(0, 1)``: half uniform, half with ``1 - r = 2**-t`` for ``t`` up to ``depth``."""
    half = max(n // 2, 2)
    uniform = np.linspace(0.0, 1.0, half + 2)[1:-1]
    boundary = 1.0 - np.exp2(-np.linspace(1.0, depth, n - half))
    return np.unique(np.concatenate([uniform, boundary]))


@dataclass(frozen=True)
class FieldSpec:
    """Parameters ``(M, alpha, g)`` of a field that is positive and blows up at ``r = 1``."""

    M: float
    alpha: float
    g: GProfile = field(default_factory=GProfile)
    r_probe: int = 4096

    def __post_init__(self):
        object.__setattr__(self, "M", float(self.M))
        object.__setattr__(self, "alpha", float(self.alpha))
        if not (math.isfinite(self.M) and self.M > 0):
            raise InvalidFieldSpec(f"M must be positive, got {self.M!r}")
        if not 0.0 < self.alpha <= 2.0:
            raise InvalidFieldSpec(f"alpha must lie in (0, 2], got {self.alpha!r}")
        if self.r_probe < 16:
            raise InvalidFieldSpec("r_probe must be at least 16")
        inf_b = self.inf_B()
        if not inf_b > 0:
            raise InvalidFieldSpec(f"field must be bounded below by a positive constant; inf B = {inf_b!r}")

    def B(self, r):
        r = np.asarray(r, dtype=float)
        return self.M * (1.0 - r) ** (-self.alpha) + self.g(r)

    def probe_points(self) -> np.ndarray:
        pts = [np.array([0.0]), graded_grid(self.r_probe)]
        for b in self.g.breaks:
            pts.append(np.array([np.nextafter(b, 0.0), b]))
        return np.unique(np.concatenate(pts))

    def inf_B(self) -> float:
        return float(np.min(self.B(self.probe_points())))

    def to_dict(self) -> dict:
        d = {"M": self.M, "alpha": self.alpha, "g": {"kind": self.g.kind, "values": list(self.g.values)}}
        if self.g.breaks:
            d["g"]["breaks"] = list(self.g.breaks)
        return d


def _singular_flux(alpha: float, r: np.ndarray) -> np.ndarray:
    """``int_0^r s (1 - s)**-alpha ds`` to full relative precision."""
    r = np.asarray(r, dtype=float)
    out = np.empty(r.shape)
    small = r <= 0.5
    if np.any(small):
        # sum_k (alpha)_k / k! * r**(k+2) / (k+2)
        x = r[small]
        coef = np.ones_like(x)
        acc = np.zeros_like(x)
        power = x * x
        for k in range(200):
            term = coef * power / (k + 2)
            acc += term
            if np.all(np.abs(term) <= 1e-17 * np.abs(acc)):
                break
            coef = coef * (alpha + k) / (k + 1)
            power = power * x
        out[small] = acc
    big = ~small
    if np.any(big):
        L = np.log1p(-r[big])

        def e(beta):
            # (1 - (1 - r)**beta) / beta, continuous through beta = 0
            if beta == 0.0:
                return -L
            return -np.expm1(beta * L) / beta

        out[big] = e(1.0 - alpha) - e(2.0 - alpha)
    return out


def flux(spec: FieldSpec, r):
    """Flux ``Phi(r)``; accepts scalars or arrays.

    Raises
    ------
    DomainError
        For ``r < 0``, ``r > 1``, or ``r = 1`` when the flux diverges there.
    """
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1) or np.any(np.isnan(arr)):
        raise DomainError("flux is defined for 0 <= r < 1")
    at_one = arr == 1.0
    if np.any(at_one) and spec.alpha >= 1:
        raise DomainError(f"flux diverges at r = 1 for alpha = {spec.alpha}")
    inner = np.where(at_one, 0.0, arr)
    out = spec.M * _singular_flux(spec.alpha, inner) + spec.g.moment(inner)
    if np.any(at_one):
        out = np.where(at_one, flux_at_one(spec), out)
    return float(out) if np.ndim(r) == 0 else out


def flux_at_one(spec: FieldSpec) -> float:
    """``Phi(1)``; ``inf`` exactly when ``alpha >= 1`` (decided from ``alpha``, not numerically)."""
    if spec.alpha >= 1:
        return math.inf
    a = spec.alpha
    return spec.M / ((1.0 - a) * (2.0 - a)) + float(spec.g.moment(1.0))


def flux_asymptote(spec: FieldSpec, r: float) -> float | None:
    """Leading behaviour of the flux as ``r -> 1``.

    ``M / ((alpha - 1) (1 - r)**(alpha - 1))`` for ``alpha > 1`` and
    ``M |ln(1 - r)|`` for ``alpha = 1``. Returns ``None`` for ``alpha < 1``,
    where the flux stays bounded.
    """
    a = spec.alpha
    if a < 1:
        return None
    if a == 1:
        return spec.M * abs(math.log1p(-r))
    return spec.M / ((a - 1.0) * (1.0 - r) ** (a - 1.0))


class RadiiCase(str, Enum):
    BOTH_INSIDE = "BothInside"
    PRIME_CLAMPED = "PrimeClamped"
    BOTH_CLAMPED = "BothClamped"


class ChannelRadii(NamedTuple):
    r_m: float
    r_m_prime: float
    case: RadiiCase


@dataclass(frozen=True)
class FluxProfile:
    field: FieldSpec
    phi_at_one: float
    c_tilde: float
    r1: float

    def flux_at(self, r):
        return flux(self.field, r)

    @property
    def flux_fn(self) -> Callable:
        return self.flux_at

    def dflux(self, r):
        """``Phi'(r) = r B(r)``."""
        r = np.asarray(r, dtype=float)
        return r * self.field.B(r)


def flux_profile(spec: FieldSpec) -> FluxProfile:
    phi1 = flux_at_one(spec)
    provisional = FluxProfile(spec, phi1, math.nan, math.nan)
    c_tilde = lemma_constant(provisional)
    r1 = channel_radii(provisional, 1).r_m
    return FluxProfile(spec, phi1, c_tilde, r1)


_RADII_TOL = 1e-12


def channel_radii_many(fp: FluxProfile, ms: Sequence[int]) -> list[ChannelRadii]:
    """Radii where the flux reaches ``m / 2`` and ``2 m``, for every ``m``.

    Roots come from bisection to ``1e-12``. ``r_m`` is the left end of its
    final bracket and ``r_m'`` the right end, so ``Phi <= m/2`` on
    ``(0, r_m)`` and ``Phi >= 2m`` on ``(r_m', 1)`` hold exactly.
    """
    ms = np.asarray(ms, dtype=int)
    if np.any(ms < 1):
        raise ValueError("channel radii are defined for m >= 1")
    phi1 = fp.phi_at_one
    fl = fp.field

    def f(x):
        return flux(fl, x)

    hi = np.nextafter(1.0, 0.0)
    out: list[ChannelRadii | None] = [None] * ms.size
    need_rm = np.flatnonzero(phi1 > ms / 2.0)
    need_rp = np.flatnonzero(phi1 >= 2.0 * ms)
    rm = np.ones(ms.size)
    rp = np.ones(ms.size)
    if need_rm.size:
        left, _ = bisect_increasing(f, ms[need_rm] / 2.0, 0.0, hi, xtol=_RADII_TOL)
        rm[need_rm] = left
    if need_rp.size:
        _, right = bisect_increasing(f, 2.0 * ms[need_rp], 0.0, hi, xtol=_RADII_TOL)
        rp[need_rp] = right
    for i, m in enumerate(ms):
        if phi1 >= 2 * m:
            case = RadiiCase.BOTH_INSIDE
        elif phi1 > m / 2:
            case = RadiiCase.PRIME_CLAMPED
        else:
            case = RadiiCase.BOTH_CLAMPED
        out[i] = ChannelRadii(float(rm[i]), float(rp[i]), case)
    return out  # type: ignore[return-value]


def channel_radii(fp: FluxProfile, m: int) -> ChannelRadii:
    return channel_radii_many(fp, [m])[0]


def lemma_ratio(fp: FluxProfile, r) -> np.ndarray:
    """``Phi'(r) / Phi(r)**2 = r B(r) / Phi(r)**2``; ``+inf`` at ``r = 0``."""
    r = np.asarray(r, dtype=float)
    phi = flux(fp.field, r)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = fp.dflux(r) / (phi * phi)
    return np.where(r == 0, np.inf, ratio)


def _tail_limit(spec: FieldSpec) -> float:
    # r B / Phi^2 -> 1/M for alpha = 2 and -> inf for alpha < 2
    return 1.0 / spec.M if spec.alpha == 2 else math.inf


def lemma_constant(fp: FluxProfile, n: int = 20000) -> float:
    """Constant ``C`` with ``Phi'(r) >= C Phi(r)**2`` on ``[0, 1)``.

    Minimum of ``r B / Phi**2`` over a boundary-graded grid (together with
    the analytic ``r -> 1`` limit), times a 0.99 safety factor.

    Raises
    ------
    NonPositive
        If the infimum is not strictly positive.
    """
    grid = graded_grid(n, depth=40.0)
    extra = [np.array([b for b in fp.field.g.breaks])] if fp.field.g.breaks else []
    grid = np.unique(np.concatenate([grid, *extra]))
    ratio = lemma_ratio(fp, grid)
    inf_ratio = min(float(np.min(ratio)), _tail_limit(fp.field))
    if not inf_ratio > 0 or not math.isfinite(inf_ratio):
        raise NonPositive(f"lemma constant infimum is {inf_ratio!r}")
    return LEMMA_SAFETY * inf_ratio


def lemma_local_bound(spec: FieldSpec, r_prime: float) -> float:
    """Crude constant ``4 inf B / sup_{[0, r']} B**2`` valid on ``[0, r']``."""
    pts = spec.probe_points()
    pts = np.concatenate([pts[pts <= r_prime], [r_prime]])
    sup_b = float(np.max(np.abs(spec.B(pts))))
    return 4.0 * spec.inf_B() / sup_b**2
