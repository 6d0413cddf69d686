"""Command-line batch driver.

``magspec <spectrum|bounds|weyl|flux|verify> --config PATH [--out DIR] [--workers N]``

Exit codes: 0 success, 1 failed verification (or a violated bound), 2 bad
configuration, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .battery import run_battery, run_bounds
from .config import BatteryConfig, ExperimentConfig, load_config
from .errors import ConfigError, MagspecError, NonConvergence
from .field import (channel_radii_many, flux, flux_asymptote, flux_profile, graded_grid, lemma_ratio)
from .io import write_csv, write_json
from .potential import tilde
from .spectrum import channel_range, negative_spectrum, weyl_ratio

log = logging.getLogger("magspec")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NONCONVERGENCE = 0, 1, 2, 3
BOUND_COLUMNS = ["alpha", "M", "potential_id", "sigma", "gamma", "C", "lhs", "rhs", "slack"]


def _header(cfg: ExperimentConfig, command: str) -> dict:
    return {"tool": "magspec", "version": __version__, "command": command,
            "field": None if cfg.field is None else cfg.field.to_dict(),
            "potential": {**cfg.potential.to_dict(), "label": cfg.potential.label},
            "mesh": {"n": cfg.mesh.n, "kind": cfg.mesh.kind, "grading": cfg.mesh.strength},
            "tolerances": {"eig_tol": cfg.tolerances.eig_tol, "quad_tol": cfg.tolerances.quad_tol,
                           "count_eps": cfg.tolerances.count_eps}}


def cmd_spectrum(cfg: ExperimentConfig, out: Path, workers: int) -> int:
    fp = None if cfg.field is None else flux_profile(cfg.field)
    ss = negative_spectrum(fp, tilde(cfg.potential), cfg.mesh, 1.0, cfg.tolerances.eig_tol,
                           cfg.tolerances.count_eps, workers)
    if cfg.outputs.format == "csv":
        write_csv(out / "spectrum.csv", ["m", "k", "lambda"], ss.csv_rows())
    else:
        write_json(out / "spectrum.json", {**_header(cfg, "spectrum"), "spectrum": ss.to_dict()})
    log.info("%d negative eigenvalues over channels %s", ss.count, ss.m_range)
    return EXIT_OK


def cmd_bounds(cfg: ExperimentConfig, out: Path, workers: int) -> int:
    res = run_bounds(cfg.field, cfg.potential, cfg.sigma_list, cfg.mesh, cfg.tolerances, workers)
    reports = res["reports"]
    if cfg.outputs.format == "csv":
        write_csv(out / "bounds.csv", BOUND_COLUMNS, [r.csv_row() for r in reports])
    else:
        ledger = res["ledger"]
        write_json(out / "bounds.json", {
            **_header(cfg, "bounds"),
            "ledger": None if ledger is None else ledger.to_dict(),
            "reports": [r.to_dict() for r in reports],
            "classical_refs": res["classical_refs"],
            "spectrum": {"count_negative": res["spectrum"].count,
                         "count_nonpositive": res["spectrum"].count_nonpositive,
                         "m_range": list(res["spectrum"].m_range)},
        })
    bad = [r for r in reports if not r.holds]
    for r in bad:
        log.error("%s violated at sigma=%s: lhs=%r rhs=%r", r.theorem, r.sigma, r.lhs, r.rhs)
    return EXIT_FAILED if bad else EXIT_OK


def cmd_weyl(cfg: ExperimentConfig, out: Path, workers: int) -> int:
    if cfg.field is not None:
        raise ConfigError("field", "weyl runs the non-magnetic operator; set field to \"none\"")
    tp = tilde(cfg.potential)
    rows = []
    for sigma in cfg.sigma_list:
        for lam in cfg.lambda_list:
            rows.append({"sigma": sigma, "lambda": lam,
                         "ratio": weyl_ratio(tp, sigma, lam, cfg.mesh, cfg.tolerances.eig_tol, workers,
                                             cfg.tolerances.quad_tol)})
    if cfg.outputs.format == "csv":
        write_csv(out / "weyl.csv", ["sigma", "lambda", "ratio"], rows)
    else:
        write_json(out / "weyl.json", {**_header(cfg, "weyl"), "rows": rows})
    return EXIT_OK


def cmd_flux(cfg: ExperimentConfig, out: Path, workers: int) -> int:
    if cfg.field is None:
        raise ConfigError("field", "flux needs a magnetic field")
    fp = flux_profile(cfg.field)
    r = graded_grid(256, depth=30.0)
    phi = flux(cfg.field, r)
    asym = [flux_asymptote(cfg.field, x) for x in r]
    flux_rows = [{"r": float(x), "phi": float(p), "phi_prime": float(dp), "lemma_ratio": float(q),
                  "asymptote": a} for x, p, dp, q, a in zip(r, phi, fp.dflux(r), lemma_ratio(fp, r), asym)]
    m_max = max(1, channel_range(fp, tilde(cfg.potential), 1.0)[1])
    radii = [{"m": m, "r_m": c.r_m, "r_m_prime": c.r_m_prime, "case": c.case.value}
             for m, c in zip(range(1, m_max + 1), channel_radii_many(fp, list(range(1, m_max + 1))))]
    if cfg.outputs.format == "csv":
        write_csv(out / "flux.csv", ["r", "phi", "phi_prime", "lemma_ratio", "asymptote"], flux_rows)
        write_csv(out / "radii.csv", ["m", "r_m", "r_m_prime", "case"], radii)
    else:
        write_json(out / "flux.json", {**_header(cfg, "flux"), "phi_at_one": fp.phi_at_one, "c_tilde": fp.c_tilde,
                                       "r1": fp.r1, "profile": flux_rows, "radii": radii})
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, out: Path, workers: int) -> int:
    bat = cfg.battery
    if bat is None:
        if cfg.field is None:
            raise ConfigError("battery", "verify needs a battery or a magnetic field")
        bat = BatteryConfig((cfg.field,), (cfg.potential,), tuple(s for s in cfg.sigma_list if s > 0) or (1.0,))
    res = run_battery(bat, cfg.mesh, cfg.tolerances, workers)
    rows = res.pop("bound_rows")
    write_json(out / "verify.json", {**_header(cfg, "verify"), **res})
    write_csv(out / "bounds.csv", BOUND_COLUMNS, rows)
    for c in res["checks"]:
        if not c["passed"]:
            log.error("FAILED %s", {k: v for k, v in c.items() if not isinstance(v, (list, dict))})
    log.info("%d checks, %d failed", res["n_checks"], res["n_failed"])
    return EXIT_OK if res["passed"] else EXIT_FAILED


COMMANDS = {"spectrum": cmd_spectrum, "bounds": cmd_bounds, "weyl": cmd_weyl, "flux": cmd_flux,
            "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="magspec", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=list(COMMANDS))
    p.add_argument("--config", required=True, help="experiment configuration (JSON)")
    p.add_argument("--out", help="output directory (overrides outputs.path)")
    p.add_argument("--workers", type=int, help="channel-level worker threads (overrides config)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        workers = cfg.workers if args.workers is None else args.workers
        if workers < 1:
            raise ConfigError("workers", "must be >= 1")
        out = Path(args.out if args.out else cfg.outputs.path)
        with np.errstate(over="ignore"):
            return COMMANDS[args.command](cfg, out, workers)
    except ConfigError as exc:
        print(f"magspec: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergence as exc:
        print(f"magspec: no convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except MagspecError as exc:
        print(f"magspec: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
