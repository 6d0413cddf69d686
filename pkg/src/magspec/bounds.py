"""Explicit constants of the form comparison ``h_m(B, Vt) >= gamma h_m(0, Vt / gamma)``
and the eigenvalue bounds that follow from it.

Per channel ``m > 0`` the constant is the smallest of

* ``gamma1 = 1/4`` when the flux never reaches ``m/2``;
* ``gamma2 = r_1**2 / 16`` when at most half the mass sits between ``r_m``
  and ``r_m'``;
* ``gamma3 = mu_m / 8`` when a share ``mu_m`` sits just inside ``r_m``;
* ``gamma4 = min(1/4, C'' pi r_1**2)`` otherwise, with
  ``C'' = r_1 C**2 / (4608 pi)`` built from the lemma constant ``C``.

Channels ``m <= 0`` compare with constant ``gamma0 = 1``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import DEFAULT_CAP, ChannelFactory, MeshConfig
from .errors import HypothesisNotMet, LedgerDegenerate
from .field import FluxProfile, RadiiCase, channel_radii_many, flux
from .numerics import count_below, lowest_eig
from .potential import TildePotential, log_moment, moment
from .spectrum import SpectrumSummary, channel_range, negative_spectrum, riesz_mean, semiclassical_constant

L_HEADROOM = 2.0


@dataclass(frozen=True)
class LedgerRow:
    m: int
    r_m: float
    r_m_prime: float
    case: RadiiCase
    kappa: float | None = None
    mu: float | None = None
    mu_cap: float | None = None

    def to_dict(self) -> dict:
        return {"m": self.m, "r_m": self.r_m, "r_m_prime": self.r_m_prime, "case": self.case.value,
                "kappa": self.kappa, "mu": self.mu, "mu_cap": self.mu_cap}


@dataclass
class GammaLedger:
    c_tilde: float
    r1: float
    c_dprime: float | None
    gamma0: float
    gamma1: float
    gamma2: float | None
    gamma3: float | None
    gamma4: float | None
    gamma: float
    per_m: list[LedgerRow]
    degenerate: bool
    passes: int = 1
    history: list[tuple[float, int]] = field(default_factory=list)

    @property
    def m_max(self) -> int:
        return self.per_m[-1].m if self.per_m else 0

    def to_dict(self, rows: bool = True) -> dict:
        d = {
            "gamma0": self.gamma0, "gamma1": self.gamma1, "gamma2": self.gamma2,
            "gamma3": self.gamma3, "gamma4": self.gamma4, "gamma": self.gamma,
            "c_tilde": self.c_tilde, "c_dprime": self.c_dprime, "r1": self.r1,
            "degenerate": self.degenerate, "passes": self.passes, "tabulated_m_max": self.m_max,
        }
        if rows:
            d["per_m"] = [row.to_dict() for row in self.per_m]
        return d


def kappa_mu(r_m: float, r_m_prime: float) -> tuple[float, float, float]:
    """``kappa = min(r_m' - r_m, r_m / 2)``, the strict cap on ``mu`` and ``mu`` = half the cap."""
    kappa = min(r_m_prime - r_m, r_m / 2.0)
    cap = (r_m - kappa) * kappa / (8.0 * (r_m_prime - r_m + kappa))
    return kappa, 0.5 * cap, cap


def c_dprime(r1: float, c_tilde: float) -> float:
    """Lower bound constant for ``int_z^{r_m'} r |v'|^2 >= C'' m**2``.

    From ``int >= z / (64 pi (r_m' - r_m)**2)``, ``z >= r_1 / 2`` and
    ``r_m' - r_m <= 6 / (C m)``: ``C'' = r_1 C**2 / (2 * 64 * 36 pi)``.
    """
    return r1 * c_tilde**2 / (4608.0 * math.pi)


def _rows(fp: FluxProfile, ms: list[int]) -> list[LedgerRow]:
    rows = []
    for m, rad in zip(ms, channel_radii_many(fp, ms)):
        if rad.case is RadiiCase.BOTH_CLAMPED:
            rows.append(LedgerRow(m, rad.r_m, rad.r_m_prime, rad.case))
            continue
        kappa, mu, cap = kappa_mu(rad.r_m, rad.r_m_prime)
        rows.append(LedgerRow(m, rad.r_m, rad.r_m_prime, rad.case, kappa, mu, cap))
    return rows


def build_ledger(fp: FluxProfile, tp: TildePotential, max_passes: int = 64, strict: bool = False) -> GammaLedger:
    """All proof constants over the channels that can contribute.

    The tabulated range and ``gamma`` depend on each other (``gamma3`` is a
    minimum over tabulated ``m``; the range grows as ``gamma`` shrinks), so
    the range is re-derived from each new ``gamma`` until it stops growing.
    At least ``m = 1`` is always tabulated. When the flux never exceeds 1/2
    every positive channel is in the ``gamma1`` regime and ``gamma = 1/4``;
    with ``strict=True`` that case raises :class:`LedgerDegenerate` instead.
    """
    gamma0, gamma1 = 1.0, 0.25
    r1 = fp.r1
    degenerate = not fp.phi_at_one > 0.5
    if degenerate:
        if strict:
            raise LedgerDegenerate(f"flux at r = 1 is {fp.phi_at_one!r} <= 1/2; r_1 = 1")
        m_max = max(1, channel_range(fp, tp, min(gamma0, gamma1))[1])
        rows = _rows(fp, list(range(1, m_max + 1)))
        return GammaLedger(fp.c_tilde, 1.0, None, gamma0, gamma1, None, None, None,
                           min(gamma0, gamma1), rows, True, 1, [(min(gamma0, gamma1), m_max)])

    gamma2 = r1 * r1 / 16.0
    cdd = c_dprime(r1, fp.c_tilde)
    gamma4 = min(0.25, cdd * math.pi * r1 * r1)
    fixed = min(gamma0, gamma1, gamma2, gamma4)

    gamma = min(gamma0, gamma1)
    rows: list[LedgerRow] = []
    history = []
    passes = 0
    while True:
        passes += 1
        m_max = max(1, channel_range(fp, tp, gamma)[1])
        if m_max > len(rows):
            rows.extend(_rows(fp, list(range(len(rows) + 1, m_max + 1))))
        mus = [row.mu for row in rows if row.mu is not None]
        gamma3 = min(mus) / 8.0 if mus else None
        new_gamma = fixed if gamma3 is None else min(fixed, gamma3)
        history.append((new_gamma, m_max))
        grown = channel_range(fp, tp, new_gamma)[1] > len(rows)
        gamma = new_gamma
        if not grown or passes >= max_passes:
            break
    return GammaLedger(fp.c_tilde, r1, cdd, gamma0, gamma1, gamma2, gamma3, gamma4, gamma, rows, False,
                       passes, history)


def _probe(a: float, b: float, n: int = 256) -> np.ndarray:
    """Points in the open interval ``(a, b)``, clustered at both ends."""
    t = np.linspace(0.0, 1.0, n + 2)[1:-1]
    s = 0.5 - 0.5 * np.cos(np.pi * t)
    r = a + (b - a) * s
    return np.unique(r[(r > a) & (r < b)])


def check_ledger(fp: FluxProfile, ledger: GammaLedger) -> dict:
    """Re-verify every defining inequality of the ledger on probe grids.

    Returns counts of violations per inequality (all zero when consistent).
    """
    v16 = v17 = vest = vmu = vkappa = 0
    for row in ledger.per_m:
        m = row.m
        if row.r_m > 0:
            r = _probe(0.0, row.r_m)
            v16 += int(np.sum(m - flux(fp.field, r) < m / 2.0))
        if row.r_m_prime < 1:
            r = _probe(row.r_m_prime, 1.0)
            v17 += int(np.sum(flux(fp.field, r) - m < m))
        if row.case is RadiiCase.BOTH_INSIDE and not row.r_m_prime - row.r_m <= 6.0 / (ledger.c_tilde * m):
            vest += 1
        if row.mu is not None:
            if not 0 < row.mu < row.mu_cap or not row.mu < 1:
                vmu += 1
            if row.kappa != min(row.r_m_prime - row.r_m, row.r_m / 2.0):
                vkappa += 1
    ok = v16 == v17 == vest == vmu == vkappa == 0
    if not ledger.degenerate:
        mus = [row.mu for row in ledger.per_m if row.mu is not None]
        expect = min([ledger.gamma0, ledger.gamma1, ledger.gamma2, ledger.gamma4]
                     + ([min(mus) / 8.0] if mus else []))
        ok = ok and ledger.gamma == expect and 0 < ledger.gamma <= 1
    return {"eq16_violations": v16, "eq17_violations": v17, "width_violations": vest,
            "mu_violations": vmu, "kappa_violations": vkappa, "ok": bool(ok)}


def dprime_chain(fp: FluxProfile, row: LedgerRow, c_dd: float, r: np.ndarray, v: np.ndarray) -> dict | None:
    """Evaluate the derivative lower bound on one trial state.

    ``v`` is sampled on the grid ``r`` and rescaled to ``2 pi int v^2 r dr = 1``.
    Returns ``None`` when the state is outside the regime where the bound is
    claimed (more than half the mass between ``r_m`` and ``r_m'`` and at
    most ``mu`` just inside ``r_m``). Otherwise returns the integral over
    ``(z, r_m')`` and the successive lower bounds ``first >= second >=
    bound = C'' m**2`` of the chain.
    """
    if row.mu is None:
        return None
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    norm = 2.0 * math.pi * np.trapezoid(v * v * r, r)
    v = v / math.sqrt(norm)

    def mass(a, b):
        sel = (r >= a) & (r <= b)
        return 2.0 * math.pi * np.trapezoid((v * v * r)[sel], r[sel]) if sel.sum() > 1 else 0.0

    if not mass(row.r_m, row.r_m_prime) > 0.5:
        return None
    if not mass(row.r_m - row.kappa, row.r_m) <= row.mu:
        return None
    window = np.flatnonzero((r > row.r_m - row.kappa) & (r < row.r_m))
    if window.size == 0:
        return None
    z_idx = window[np.argmin(np.abs(v[window]))]
    sel = slice(z_idx, np.searchsorted(r, row.r_m_prime, side="right"))
    dv = np.gradient(v, r)
    integral = float(np.trapezoid((r * dv * dv)[sel], r[sel]))
    z = float(r[z_idx])
    width = row.r_m_prime - row.r_m
    return {"integral": integral, "z": z,
            "first": z / (16.0 * math.pi * (width + row.kappa) ** 2),
            "second": z / (64.0 * math.pi * width**2),
            "bound": c_dd * row.m**2}


def verify_form_comparison(fp: FluxProfile | None, tp: TildePotential, ledger: GammaLedger | None,
                           mesh_cfg: MeshConfig, tol: float = 1e-10, workers: int = 1,
                           cap: float = DEFAULT_CAP, m_range: tuple[int, int] | None = None,
                           exhaustive: bool = False) -> dict:
    """Lowest eigenvalue of ``h_m(B, Vt) - gamma h_m(0, Vt / gamma)`` over the active channels.

    Returns the worst gap and the channel where it occurs. ``resolved``
    holds the channels whose gap was computed to ``tol``; every other
    channel is certified by a Sturm count to lie above the worst gap.
    ``exhaustive=True`` resolves every channel.
    """
    gamma = 1.0 if ledger is None else ledger.gamma
    if m_range is None:
        m_min, m_max = channel_range(fp, tp, gamma)
    else:
        m_min, m_max = m_range
    factory = ChannelFactory(fp, tp, mesh_cfg.build(), cap)
    ms = list(range(m_min, m_max + 1))

    def gap(m: int) -> float:
        return lowest_eig(factory.comparison(m, gamma), tol)

    def pmap(fn, items):
        if workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(fn, items))
        return [fn(m) for m in items]

    # Resolve a few low channels exactly, then one Sturm count per remaining
    # channel certifies that its lowest eigenvalue is not below the current worst.
    seeds = [m for m in (0, 1, -1) if m_min <= m <= m_max] or ms[:1]
    gaps = dict(zip(seeds, pmap(gap, seeds)))
    if exhaustive:
        rest = [m for m in ms if m not in gaps]
    else:
        bar = min(gaps.values())
        rest = [m for m, c in zip(ms, pmap(lambda m: count_below(factory.comparison(m, gamma), bar), ms))
                if c > 0 and m not in gaps]
    gaps.update(zip(rest, pmap(gap, rest)))
    worst_m = min(sorted(gaps), key=gaps.get)
    return {"worst_gap": float(gaps[worst_m]), "worst_m": worst_m, "gamma": gamma, "channels": len(ms),
            "resolved": {m: float(gaps[m]) for m in sorted(gaps)}}


@dataclass
class BoundReport:
    theorem: str
    lhs: float
    rhs: float
    constant_used: float
    sigma: float
    gamma: float
    inputs: dict
    lhs_nonpositive: float | None = None
    classical_refs: dict | None = None

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        ok = self.slack >= 0
        if self.lhs_nonpositive is not None:
            ok = ok and self.rhs - self.lhs_nonpositive >= 0
        return ok

    def to_dict(self) -> dict:
        d = {"theorem": self.theorem, "sigma": self.sigma, "gamma": self.gamma, "C": self.constant_used,
             "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack, "holds": self.holds, "inputs": self.inputs}
        if self.lhs_nonpositive is not None:
            d["lhs_nonpositive"] = self.lhs_nonpositive
        if self.classical_refs is not None:
            d["classical_refs"] = self.classical_refs
        return d

    def csv_row(self) -> dict:
        fieldspec = self.inputs.get("field") or {}
        return {"alpha": fieldspec.get("alpha", "none"), "M": fieldspec.get("M", "none"),
                "potential_id": self.inputs.get("potential_id", ""), "sigma": self.sigma,
                "gamma": self.gamma, "C": self.constant_used, "lhs": self.lhs, "rhs": self.rhs,
                "slack": self.slack}


def _inputs(fp: FluxProfile | None, potential_id: str, mesh_cfg: MeshConfig | None) -> dict:
    d: dict = {"field": None if fp is None else fp.field.to_dict(), "potential_id": potential_id}
    if mesh_cfg is not None:
        d["mesh"] = {"n": mesh_cfg.n, "kind": mesh_cfg.kind, "strength": mesh_cfg.strength}
    return d


def theorem1_bound(fp: FluxProfile | None, tp: TildePotential, ledger: GammaLedger | None, sigma: float,
                   L_config: float | None = None, *, spectrum: SpectrumSummary | None = None,
                   mesh_cfg: MeshConfig | None = None, eig_tol: float = 1e-10, quad_tol: float = 1e-10,
                   workers: int = 1, potential_id: str = "") -> BoundReport:
    """Riesz mean against ``(2 pi L / gamma) int_0^1 Vt^(sigma+1) r dr``.

    ``L_config`` defaults to ``2 L^cl_{sigma,2}``. The polar-coordinate
    factor ``2 pi`` is kept explicit.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    lcl = semiclassical_constant(sigma)
    L = L_HEADROOM * lcl if L_config is None else L_config
    if L < lcl * (1 - 1e-12):
        raise ValueError(f"L_config={L} is below the semiclassical constant {lcl}")
    gamma = 1.0 if ledger is None else ledger.gamma
    C = 2.0 * math.pi * L / gamma
    rhs = C * moment(tp, sigma, quad_tol)
    if spectrum is None:
        if mesh_cfg is None:
            raise ValueError("need either a spectrum or a mesh configuration")
        spectrum = negative_spectrum(fp, tp, mesh_cfg, gamma, eig_tol, workers=workers)
    lhs = riesz_mean(spectrum, sigma)
    inputs = _inputs(fp, potential_id, spectrum.mesh)
    inputs["L_config"] = L
    inputs["L_over_Lcl"] = L / lcl
    return BoundReport("theorem1", lhs, rhs, C, sigma, gamma, inputs)


def theorem2_bound(fp: FluxProfile | None, tp: TildePotential, ledger: GammaLedger | None, *,
                   spectrum: SpectrumSummary | None = None, mesh_cfg: MeshConfig | None = None,
                   eig_tol: float = 1e-10, quad_tol: float = 1e-10, workers: int = 1,
                   potential_id: str = "") -> BoundReport:
    """Eigenvalue count against ``1 + (2 pi / gamma) int_0^1 Vt (1 + |ln r|) r dr``."""
    gamma = 1.0 if ledger is None else ledger.gamma
    C1 = 2.0 * math.pi / gamma
    rhs = 1.0 + C1 * log_moment(tp, quad_tol)
    if spectrum is None:
        if mesh_cfg is None:
            raise ValueError("need either a spectrum or a mesh configuration")
        spectrum = negative_spectrum(fp, tp, mesh_cfg, gamma, eig_tol, workers=workers)
    return BoundReport("theorem2", float(spectrum.count), rhs, C1, 0.0, gamma,
                       _inputs(fp, potential_id, spectrum.mesh), lhs_nonpositive=float(spectrum.count_nonpositive))


def laptev_weidl(fp: FluxProfile | None, tp: TildePotential, sigma: float, magnetic: SpectrumSummary,
                 quad_tol: float = 1e-10) -> dict:
    """Riesz mean of ``H(A, Vt)`` against ``L^cl 2 pi int Vt^(sigma+1) r dr``.

    Raises
    ------
    HypothesisNotMet
        For ``sigma < 3/2`` or a vector potential outside ``L^2`` (``alpha >= 3/2``).
    """
    if sigma < 1.5:
        raise HypothesisNotMet(f"needs sigma >= 3/2, got {sigma}")
    if fp is not None and fp.field.alpha >= 1.5:
        raise HypothesisNotMet(f"vector potential not square integrable for alpha = {fp.field.alpha} >= 3/2")
    lhs = riesz_mean(magnetic, sigma)
    rhs = semiclassical_constant(sigma) * 2.0 * math.pi * moment(tp, sigma, quad_tol)
    return {"applicable": True, "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs if rhs else 0.0}


def classical_refs(fp: FluxProfile | None, tp: TildePotential, sigma: float, nonmagnetic: SpectrumSummary,
                   magnetic: SpectrumSummary | None = None, L_config: float | None = None,
                   quad_tol: float = 1e-10, radial: bool = True) -> dict:
    """Classical bounds evaluated against computed spectra.

    ``nonmagnetic`` is the spectrum of ``H(0, Vt)``; ``magnetic`` that of
    ``H(A, Vt)`` (needed only for the Laptev-Weidl comparison).
    """
    out: dict = {}
    if sigma > 0:
        lcl = semiclassical_constant(sigma)
        L = L_HEADROOM * lcl if L_config is None else L_config
        mom = moment(tp, sigma, quad_tol)
        lhs = riesz_mean(nonmagnetic, sigma)
        out["lieb_thirring"] = {
            "applicable": True, "sigma": sigma, "lhs": lhs,
            "rhs_classical": lcl * 2.0 * math.pi * mom, "rhs_config": L * 2.0 * math.pi * mom,
            "ratio_classical": lhs / (lcl * 2.0 * math.pi * mom) if mom else 0.0,
        }
    else:
        out["lieb_thirring"] = {"applicable": False, "reason": "fails in two dimensions for sigma = 0"}
    rhs_ch = 1.0 + 2.0 * math.pi * log_moment(tp, quad_tol)
    out["chadan"] = {"applicable": True, "radial_V": radial, "lhs": float(nonmagnetic.count),
                     "lhs_nonpositive": float(nonmagnetic.count_nonpositive), "rhs": rhs_ch,
                     "holds": nonmagnetic.count_nonpositive <= rhs_ch}
    if magnetic is None:
        out["laptev_weidl"] = {"applicable": False, "reason": "no magnetic spectrum supplied"}
    else:
        try:
            out["laptev_weidl"] = laptev_weidl(fp, tp, sigma, magnetic, quad_tol)
        except HypothesisNotMet as exc:
            out["laptev_weidl"] = {"applicable": False, "reason": str(exc)}
    return out
