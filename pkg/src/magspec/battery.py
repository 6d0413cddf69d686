"""The invariant battery run by ``magspec verify``.

Each check returns a record ``{"name", "passed", ...details}``; the battery
passes iff every record does. Records hold no timings, so reports are
reproducible byte for byte.
"""
from __future__ import annotations

import math

import numpy as np

from .bounds import (build_ledger, check_ledger, classical_refs, theorem1_bound, theorem2_bound,
                     verify_form_comparison)
from .channel import ChannelFactory, MeshConfig, build_mesh
from .config import BatteryConfig, Tolerances
from .field import FieldSpec, flux, flux_asymptote, flux_profile, graded_grid, lemma_ratio
from .numerics import eigs_below, integrate, lowest_eig
from .potential import PotentialSpec, constant, tilde
from .spectrum import negative_spectrum, weyl_ratio

# first zeros of J_0
BESSEL_J0_ZEROS = (2.404825557695773, 5.520078110286311, 8.653727912911012)

GAP_FLOOR = -1e-8
DIAMAGNETIC_SLACK = 1e-6


def _field_id(fs: FieldSpec) -> str:
    g = "" if fs.g.kind == "constant" and fs.g.values == (0.0,) else f",g={fs.g.kind}"
    return f"alpha={fs.alpha!r},M={fs.M!r}{g}"


def check_bessel(n: int, tol: float = 1e-10) -> dict:
    zero = tilde(constant(0.0))
    cm = ChannelFactory(None, zero, build_mesh(n, "uniform")).assemble(0)
    top = (BESSEL_J0_ZEROS[-1] ** 2) * 1.5
    ev = eigs_below(cm.matrix, top, tol)[:3]
    ref = np.square(BESSEL_J0_ZEROS)
    rel = np.abs(ev - ref) / ref
    return {"name": "bessel_baseline", "passed": bool(ev.size == 3 and np.all(rel < 1e-3)),
            "n": n, "eigenvalues": ev.tolist(), "reference": ref.tolist(), "max_rel_error": float(np.max(rel))}


def check_diamagnetic(fs: FieldSpec, mesh_cfg: MeshConfig, channels: tuple[int, int], tol: float = 1e-10) -> dict:
    fp = flux_profile(fs)
    factory = ChannelFactory(fp, tilde(constant(0.0)), mesh_cfg.build())
    lows = {m: lowest_eig(factory.assemble(m).matrix, tol) for m in range(channels[0], channels[1] + 1)}
    worst_m = min(lows, key=lows.get)
    floor = fs.inf_B()
    return {"name": "diamagnetic_floor", "field": _field_id(fs),
            "passed": bool(lows[worst_m] >= floor - DIAMAGNETIC_SLACK),
            "inf_B": floor, "worst_m": worst_m, "worst_lowest": lows[worst_m]}


def check_flux(fs: FieldSpec, n_radii: int = 40, tol: float = 1e-10) -> dict:
    radii = 1.0 - np.geomspace(1.0, 1e-6, n_radii)
    radii[0] = 0.5 / n_radii
    closed = flux(fs, radii)
    points = tuple(fs.g.breaks)
    quad = np.array([integrate(lambda s: s * fs.B(s), 0.0, r, 1e-13, points=tuple(p for p in points if p < r))
                     for r in radii])
    err = np.abs(closed - quad) / np.maximum(1.0, np.abs(quad))
    rec = {"name": "flux_closed_form", "field": _field_id(fs), "passed": bool(np.max(err) <= tol),
           "radii": n_radii, "max_error": float(np.max(err))}
    if fs.alpha >= 1:
        # reported only: the leading term alone is a coarse approximation at 1 - r = 1e-3
        r = 1.0 - 1e-3
        rec["asymptote_ratio_at_1e-3"] = float(flux(fs, r) / flux_asymptote(fs, r))
    return rec


def check_lemma(fs: FieldSpec, n: int = 100_000) -> dict:
    fp = flux_profile(fs)
    grid = graded_grid(n, depth=40.0)
    phi = flux(fs, grid)
    residual = fp.dflux(grid) - fp.c_tilde * phi * phi
    scale = np.maximum(1.0, fp.dflux(grid))
    worst = float(np.min(residual / scale))
    return {"name": "lemma_constant", "field": _field_id(fs), "passed": bool(fp.c_tilde > 0 and worst >= 0),
            "c_tilde": fp.c_tilde, "min_scaled_residual": worst,
            "min_ratio": float(np.min(lemma_ratio(fp, grid[grid > 0])))}


def check_gamma_invariance(fs: FieldSpec, potentials: list[PotentialSpec]) -> dict:
    """Ledger rows depend only on the field: rows for shared channels coincide."""
    fp = flux_profile(fs)
    ledgers = [build_ledger(fp, tilde(p)) for p in potentials]
    k = min(len(led.per_m) for led in ledgers)
    same = all(led.per_m[:k] == ledgers[0].per_m[:k] for led in ledgers)
    return {"name": "gamma_field_only", "field": _field_id(fs), "passed": bool(same), "shared_channels": k}


def _deficit(gap: float) -> float:
    return max(0.0, -gap)


def check_comparison(fs: FieldSpec, pot: PotentialSpec, mesh_cfg: MeshConfig, tol: float, workers: int) -> dict:
    fp = flux_profile(fs)
    tp = tilde(pot)
    ledger = build_ledger(fp, tp)
    coarse = verify_form_comparison(fp, tp, ledger, mesh_cfg, tol, workers)
    fine = verify_form_comparison(fp, tp, ledger, mesh_cfg.refined(2), tol, workers)
    d0, d1 = _deficit(coarse["worst_gap"]), _deficit(fine["worst_gap"])
    order = math.log2(d0 / d1) if d0 > 0 and d1 > 0 else None
    shrinking = d1 == 0.0 or (d0 > 0 and d1 <= 0.5 * d0)
    return {"name": "form_comparison", "field": _field_id(fs), "potential": pot.label,
            "passed": bool(coarse["worst_gap"] >= GAP_FLOOR and fine["worst_gap"] >= GAP_FLOOR and shrinking),
            "gamma": ledger.gamma, "n": [mesh_cfg.n, 2 * mesh_cfg.n],
            "worst_gap": [coarse["worst_gap"], fine["worst_gap"]], "worst_m": [coarse["worst_m"], fine["worst_m"]],
            "deficit_order": order}


def run_bounds(fs: FieldSpec | None, pot: PotentialSpec, sigmas, mesh_cfg: MeshConfig, tols: Tolerances,
               workers: int = 1, with_refs: bool = True) -> dict:
    """Theorem 1 for every ``sigma`` and Theorem 2, sharing one spectrum."""
    fp = None if fs is None else flux_profile(fs)
    tp = tilde(pot)
    ledger = None if fp is None else build_ledger(fp, tp)
    gamma = 1.0 if ledger is None else ledger.gamma
    mag = negative_spectrum(fp, tp, mesh_cfg, gamma, tols.eig_tol, tols.count_eps, workers)
    reports = []
    for s in sigmas:
        if s > 0:
            reports.append(theorem1_bound(fp, tp, ledger, s, spectrum=mag, quad_tol=tols.quad_tol,
                                          potential_id=pot.label))
    reports.append(theorem2_bound(fp, tp, ledger, spectrum=mag, quad_tol=tols.quad_tol, potential_id=pot.label))
    refs = None
    if with_refs:
        nonmag = negative_spectrum(None, tp, mesh_cfg, 1.0, tols.eig_tol, tols.count_eps, workers)
        refs = {repr(float(s)): classical_refs(fp, tp, s, nonmag, mag, quad_tol=tols.quad_tol, radial=pot.is_radial)
                for s in sigmas}
    return {"ledger": ledger, "spectrum": mag, "reports": reports, "classical_refs": refs}


def check_weyl(lambdas, mesh_cfg: MeshConfig, tols: Tolerances, workers: int) -> dict:
    tp = tilde(constant(1.0))
    ratios = [weyl_ratio(tp, 1.0, lam, mesh_cfg, tols.eig_tol, workers, tols.quad_tol) for lam in lambdas]
    increasing = all(a < b for a, b in zip(ratios[:-1], ratios[1:]))
    return {"name": "weyl_law", "passed": bool(increasing and 0.9 <= ratios[-1] <= 1.1),
            "lambdas": list(lambdas), "ratios": ratios}


def run_battery(bat: BatteryConfig, mesh_cfg: MeshConfig, tols: Tolerances, workers: int = 1) -> dict:
    checks: list[dict] = [check_bessel(bat.bessel_n, tols.eig_tol)]
    bound_rows: list[dict] = []
    for fs in bat.fields:
        checks.append(check_flux(fs))
        checks.append(check_lemma(fs))
        checks.append(check_diamagnetic(fs, mesh_cfg, bat.diamagnetic_channels, tols.eig_tol))
        checks.append(check_gamma_invariance(fs, list(bat.potentials)))
        for pot in bat.potentials:
            fp = flux_profile(fs)
            ledger = build_ledger(fp, tilde(pot))
            chain = check_ledger(fp, ledger)
            checks.append({"name": "ledger_chain", "field": _field_id(fs), "potential": pot.label,
                           "passed": chain.pop("ok"), "gamma": ledger.gamma, "channels": len(ledger.per_m), **chain})
            checks.append(check_comparison(fs, pot, bat.comparison_mesh, tols.eig_tol, workers))
            out = run_bounds(fs, pot, bat.sigma_list, mesh_cfg, tols, workers, with_refs=False)
            for rep in out["reports"]:
                checks.append({"name": rep.theorem, "field": _field_id(fs), "potential": pot.label,
                               "sigma": rep.sigma, "passed": rep.holds, "lhs": rep.lhs, "rhs": rep.rhs,
                               "slack": rep.slack})
                bound_rows.append(rep.csv_row())
    checks.append(check_weyl(bat.weyl_lambdas, bat.weyl_mesh, tols, workers))
    return {"passed": all(c["passed"] for c in checks), "n_checks": len(checks),
            "n_failed": sum(not c["passed"] for c in checks), "checks": checks, "bound_rows": bound_rows}
