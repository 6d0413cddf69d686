"""Electric potentials ``V(r, theta) = v(r) (1 + b cos theta)`` and their angular supremum.

The supremum over angles of the positive part is exact for this family:
``(1 + |b|) max(v, 0)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidPotentialSpec
from .numerics import integrate

PROFILE_KINDS = ("step", "power", "gaussian", "table")


@dataclass(frozen=True)
class RadialProfile:
    """Bounded radial profile ``v(r)`` on ``[0, 1]``.

    ======== ============================ =========================================
    kind     params                       v(r)
    ======== ============================ =========================================
    step     ``V0, r0``                   ``V0`` for ``r < r0`` (all r if r0 = 1)
    power    ``c, p`` (``p >= 0``)        ``c r**p``
    gaussian ``a, s`` (``s > 0``)         ``a exp(-r**2 / s**2)``
    table    ``values, breaks``           piecewise constant, as for ``g``
    ======== ============================ =========================================
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        p = dict(self.params)
        object.__setattr__(self, "params", p)
        req = {"step": {"V0", "r0"}, "power": {"c", "p"}, "gaussian": {"a", "s"}, "table": {"values", "breaks"}}
        if self.kind not in req:
            raise InvalidPotentialSpec(f"unknown profile.kind {self.kind!r}; expected one of {PROFILE_KINDS}")
        if set(p) != req[self.kind]:
            raise InvalidPotentialSpec(
                f"profile.params for {self.kind} must be exactly {sorted(req[self.kind])}, got {sorted(p)}")
        if self.kind == "table":
            vals = [float(v) for v in p["values"]]
            brks = [float(b) for b in p["breaks"]]
            if len(brks) != len(vals) - 1 or not vals:
                raise InvalidPotentialSpec("profile.params.breaks needs one entry fewer than values")
            edges = [0.0, *brks, 1.0]
            if any(not a < b for a, b in zip(edges[:-1], edges[1:])):
                raise InvalidPotentialSpec("profile.params.breaks must increase strictly inside (0, 1)")
            p["values"], p["breaks"] = vals, brks
            if not all(math.isfinite(v) for v in vals):
                raise InvalidPotentialSpec("profile.params.values must be finite")
            return
        for k in req[self.kind]:
            p[k] = float(p[k])
            if not math.isfinite(p[k]):
                raise InvalidPotentialSpec(f"profile.params.{k} must be finite")
        if self.kind == "step" and not 0.0 < p["r0"] <= 1.0:
            raise InvalidPotentialSpec("profile.params.r0 must lie in (0, 1]")
        if self.kind == "power" and p["p"] < 0:
            raise InvalidPotentialSpec("profile.params.p must be >= 0 (bounded potential)")
        if self.kind == "gaussian" and p["s"] <= 0:
            raise InvalidPotentialSpec("profile.params.s must be positive")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        p = self.params
        if self.kind == "step":
            inside = (r < p["r0"]) | (p["r0"] >= 1.0)  # r0 = 1 covers the closed disk
            return np.where(inside, p["V0"], 0.0)
        if self.kind == "power":
            return p["c"] * r ** p["p"]
        if self.kind == "gaussian":
            return p["a"] * np.exp(-(r / p["s"]) ** 2)
        idx = np.searchsorted(np.asarray(p["breaks"]), r, side="right")
        return np.asarray(p["values"])[idx]

    @property
    def breakpoints(self) -> tuple[float, ...]:
        if self.kind == "step":
            return (self.params["r0"],) if self.params["r0"] < 1 else ()
        if self.kind == "table":
            return tuple(self.params["breaks"])
        return ()

    def scaled(self, lam: float) -> "RadialProfile":
        p = dict(self.params)
        key = {"step": "V0", "power": "c", "gaussian": "a"}.get(self.kind)
        if key is None:
            p["values"] = [lam * v for v in p["values"]]
        else:
            p[key] = lam * p[key]
        return RadialProfile(self.kind, p)

    def sup_r2_positive(self) -> float:
        """``sup_{0 <= r <= 1} r**2 max(v(r), 0)``, in closed form."""
        p = self.params
        if self.kind == "step":
            return max(p["V0"], 0.0) * p["r0"] ** 2
        if self.kind == "power":
            return max(p["c"], 0.0)
        if self.kind == "gaussian":
            a, s = p["a"], p["s"]
            if a <= 0:
                return 0.0
            # r^2 exp(-r^2/s^2) peaks at r = s
            return a * s * s / math.e if s < 1 else a * math.exp(-1.0 / (s * s))
        edges = [0.0, *p["breaks"], 1.0]
        return max(max(v, 0.0) * hi * hi for v, hi in zip(p["values"], edges[1:]))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}


@dataclass(frozen=True)
class PotentialSpec:
    profile: RadialProfile
    b: float = 0.0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "b", float(self.b))
        if not abs(self.b) <= 1.0:
            raise InvalidPotentialSpec(f"angular.b must satisfy |b| <= 1, got {self.b!r}")

    def V(self, r, theta):
        return self.profile(r) * (1.0 + self.b * np.cos(theta))

    @property
    def is_radial(self) -> bool:
        return self.b == 0.0

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        p = self.profile.params
        body = ",".join(f"{k}={p[k]!r}" for k in sorted(p)) if self.profile.kind != "table" else "table"
        return f"{self.profile.kind}({body})" + (f"*cos(b={self.b!r})" if self.b else "")

    def to_dict(self) -> dict:
        return {"profile": self.profile.to_dict(), "angular": {"b": self.b}}


@dataclass(frozen=True)
class TildePotential:
    """Angular supremum of ``V_+``: ``factor * max(profile(r), 0)``, always ``>= 0``."""

    profile: RadialProfile
    factor: float = 1.0
    is_radial: bool = True

    def __call__(self, r):
        return self.factor * np.maximum(self.profile(r), 0.0)

    values = __call__

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return self.profile.breakpoints

    def sup_r2(self) -> float:
        return self.factor * self.profile.sup_r2_positive()

    def is_zero(self) -> bool:
        return self.sup_r2() == 0.0 and self.sup() == 0.0

    def sup(self) -> float:
        p = self.profile.params
        k = self.profile.kind
        if k == "step":
            s = max(p["V0"], 0.0)
        elif k == "power":
            s = max(p["c"], 0.0)
        elif k == "gaussian":
            s = max(p["a"], 0.0)
        else:
            s = max(max(v, 0.0) for v in p["values"])
        return self.factor * s

    def scaled(self, lam: float) -> "TildePotential":
        if lam <= 0:
            raise ValueError("coupling must be positive")
        return TildePotential(self.profile.scaled(lam), self.factor, self.is_radial)


def tilde(spec: PotentialSpec) -> TildePotential:
    """Essential supremum over angles of ``V_+`` as a radial function."""
    return TildePotential(spec.profile, 1.0 + abs(spec.b), spec.is_radial)


def moment(tp: TildePotential, sigma: float, tol: float = 1e-10) -> float:
    """``int_0^1 Vt(r)**(sigma + 1) r dr``."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if tp.sup() == 0.0:
        return 0.0
    return integrate(lambda r: tp(r) ** (sigma + 1.0) * r, 0.0, 1.0, tol, points=tp.breakpoints)


def log_moment(tp: TildePotential, tol: float = 1e-10) -> float:
    """``int_0^1 Vt(r) (1 + |ln r|) r dr``."""
    if tp.sup() == 0.0:
        return 0.0
    return integrate(lambda r: tp(r) * (1.0 + np.abs(np.log(r))) * r, 0.0, 1.0, tol, points=tp.breakpoints)


def step(V0: float, r0: float, b: float = 0.0) -> PotentialSpec:
    return PotentialSpec(RadialProfile("step", {"V0": V0, "r0": r0}), b)


def power(c: float, p: float, b: float = 0.0) -> PotentialSpec:
    return PotentialSpec(RadialProfile("power", {"c": c, "p": p}), b)


def gaussian(a: float, s: float, b: float = 0.0) -> PotentialSpec:
    return PotentialSpec(RadialProfile("gaussian", {"a": a, "s": s}), b)


def constant(v: float, b: float = 0.0) -> PotentialSpec:
    return step(v, 1.0, b)
