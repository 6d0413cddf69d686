"""Strict parsing of experiment configuration files (JSON syntax).

Every mapping accepts only its documented keys; anything else raises
:class:`ConfigError` naming the dotted path of the offending key.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .channel import MESH_KINDS, MeshConfig
from .errors import ConfigError, InvalidFieldSpec, InvalidPotentialSpec
from .field import FieldSpec, GProfile
from .potential import PotentialSpec, RadialProfile

DEFAULT_EIG_TOL = 1e-10
DEFAULT_QUAD_TOL = 1e-10


@dataclass(frozen=True)
class Tolerances:
    eig_tol: float = DEFAULT_EIG_TOL
    quad_tol: float = DEFAULT_QUAD_TOL
    count_eps: float = 10 * DEFAULT_EIG_TOL


@dataclass(frozen=True)
class Outputs:
    format: str = "json"
    path: str = "out"


@dataclass(frozen=True)
class BatteryConfig:
    """Cases swept by ``verify``."""

    fields: tuple[FieldSpec, ...]
    potentials: tuple[PotentialSpec, ...]
    sigma_list: tuple[float, ...] = (0.5, 1.0, 2.0)
    comparison_mesh: MeshConfig = MeshConfig(4096, "graded", 2.0)
    weyl_lambdas: tuple[float, ...] = (1e2, 1e3, 1e4)
    weyl_mesh: MeshConfig = MeshConfig(2048, "uniform", 2.0)
    bessel_n: int = 4096
    diamagnetic_channels: tuple[int, int] = (-10, 40)


@dataclass(frozen=True)
class ExperimentConfig:
    field: FieldSpec | None
    potential: PotentialSpec
    sigma_list: tuple[float, ...] = (1.0,)
    lambda_list: tuple[float, ...] = (1e2, 1e3, 1e4)
    mesh: MeshConfig = MeshConfig()
    tolerances: Tolerances = Tolerances()
    outputs: Outputs = Outputs()
    workers: int = 1
    battery: BatteryConfig | None = None
    source: str = ""
    raw: dict = field(default_factory=dict, compare=False)


def _mapping(obj, path: str, allowed: set[str], required: set[str] = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(path or "<root>", "expected a mapping")
    for k in obj:
        if k not in allowed:
            where = f"{path}.{k}" if path else k
            raise ConfigError(where, f"unknown key; allowed keys are {sorted(allowed)}")
    for k in required:
        if k not in obj:
            where = f"{path}.{k}" if path else k
            raise ConfigError(where, "missing required key")
    return obj


def _number(obj, path: str, *, positive: bool = False, nonneg: bool = False) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigError(path, f"expected a number, got {obj!r}")
    x = float(obj)
    if not math.isfinite(x):
        raise ConfigError(path, "must be finite")
    if positive and not x > 0:
        raise ConfigError(path, "must be positive")
    if nonneg and x < 0:
        raise ConfigError(path, "must be non-negative")
    return x


def _integer(obj, path: str, minimum: int | None = None) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise ConfigError(path, f"expected an integer, got {obj!r}")
    if minimum is not None and obj < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    return obj


def _numbers(obj, path: str, **kw) -> tuple[float, ...]:
    if not isinstance(obj, list) or not obj:
        raise ConfigError(path, "expected a non-empty list of numbers")
    return tuple(_number(v, f"{path}[{i}]", **kw) for i, v in enumerate(obj))


def parse_field(obj, path: str = "field") -> FieldSpec | None:
    if obj == "none" or obj is None:
        return None
    d = _mapping(obj, path, {"M", "alpha", "g"}, {"M", "alpha"})
    g = GProfile()
    if "g" in d:
        gd = _mapping(d["g"], f"{path}.g", {"kind", "values", "breaks"}, {"kind", "values"})
        try:
            g = GProfile(gd["kind"], tuple(_numbers(gd["values"], f"{path}.g.values")),
                         tuple(_numbers(gd["breaks"], f"{path}.g.breaks")) if gd.get("breaks") else ())
        except InvalidFieldSpec as exc:
            raise ConfigError(f"{path}.g", str(exc)) from exc
        except TypeError as exc:
            raise ConfigError(f"{path}.g.kind", str(exc)) from exc
    try:
        return FieldSpec(_number(d["M"], f"{path}.M"), _number(d["alpha"], f"{path}.alpha"), g)
    except InvalidFieldSpec as exc:
        raise ConfigError(path, str(exc)) from exc


_PARAMS = {"step": {"V0", "r0"}, "power": {"c", "p"}, "gaussian": {"a", "s"}, "table": {"values", "breaks"}}


def parse_potential(obj, path: str = "potential") -> PotentialSpec:
    d = _mapping(obj, path, {"profile", "angular", "name"}, {"profile"})
    pd = _mapping(d["profile"], f"{path}.profile", {"kind", "params"}, {"kind", "params"})
    kind = pd["kind"]
    if kind not in _PARAMS:
        raise ConfigError(f"{path}.profile.kind", f"expected one of {sorted(_PARAMS)}")
    params = _mapping(pd["params"], f"{path}.profile.params", _PARAMS[kind], _PARAMS[kind])
    b = 0.0
    if "angular" in d:
        ad = _mapping(d["angular"], f"{path}.angular", {"b"}, {"b"})
        b = _number(ad["b"], f"{path}.angular.b")
    name = d.get("name", "")
    if not isinstance(name, str):
        raise ConfigError(f"{path}.name", "expected a string")
    try:
        return PotentialSpec(RadialProfile(kind, params), b, name)
    except (InvalidPotentialSpec, ValueError, TypeError) as exc:
        key = "angular.b" if "angular.b" in str(exc) else "profile.params"
        raise ConfigError(f"{path}.{key}", str(exc)) from exc


def parse_mesh(obj, path: str = "mesh") -> MeshConfig:
    d = _mapping(obj, path, {"n", "kind", "grading"})
    kind = d.get("kind", "graded")
    if kind not in MESH_KINDS:
        raise ConfigError(f"{path}.kind", f"expected one of {list(MESH_KINDS)}")
    n = _integer(d.get("n", 2048), f"{path}.n", minimum=16)
    grading = _number(d.get("grading", 2.0), f"{path}.grading", positive=True)
    return MeshConfig(n, kind, grading)


def _parse_battery(obj, path: str = "battery") -> BatteryConfig:
    d = _mapping(obj, path, {"fields", "potentials", "sigma_list", "comparison_mesh", "weyl_lambdas",
                             "weyl_mesh", "bessel_n", "diamagnetic_channels"}, {"fields", "potentials"})
    if not isinstance(d["fields"], list) or not d["fields"]:
        raise ConfigError(f"{path}.fields", "expected a non-empty list")
    if not isinstance(d["potentials"], list) or not d["potentials"]:
        raise ConfigError(f"{path}.potentials", "expected a non-empty list")
    fields = []
    for i, f in enumerate(d["fields"]):
        fs = parse_field(f, f"{path}.fields[{i}]")
        if fs is None:
            raise ConfigError(f"{path}.fields[{i}]", "battery fields must be magnetic")
        fields.append(fs)
    pots = tuple(parse_potential(p, f"{path}.potentials[{i}]") for i, p in enumerate(d["potentials"]))
    kw: dict = {}
    if "sigma_list" in d:
        kw["sigma_list"] = _numbers(d["sigma_list"], f"{path}.sigma_list", positive=True)
    if "comparison_mesh" in d:
        kw["comparison_mesh"] = parse_mesh(d["comparison_mesh"], f"{path}.comparison_mesh")
    if "weyl_lambdas" in d:
        kw["weyl_lambdas"] = _numbers(d["weyl_lambdas"], f"{path}.weyl_lambdas", positive=True)
    if "weyl_mesh" in d:
        kw["weyl_mesh"] = parse_mesh(d["weyl_mesh"], f"{path}.weyl_mesh")
    if "bessel_n" in d:
        kw["bessel_n"] = _integer(d["bessel_n"], f"{path}.bessel_n", minimum=16)
    if "diamagnetic_channels" in d:
        dc = d["diamagnetic_channels"]
        if not isinstance(dc, list) or len(dc) != 2:
            raise ConfigError(f"{path}.diamagnetic_channels", "expected [m_min, m_max]")
        lo = _integer(dc[0], f"{path}.diamagnetic_channels[0]")
        hi = _integer(dc[1], f"{path}.diamagnetic_channels[1]", minimum=lo)
        kw["diamagnetic_channels"] = (lo, hi)
    return BatteryConfig(tuple(fields), pots, **kw)


_TOP = {"field", "potential", "sigma_list", "lambda_list", "mesh", "tolerances", "outputs", "workers", "battery"}


def parse_config(obj: dict, source: str = "") -> ExperimentConfig:
    d = _mapping(obj, "", _TOP, {"field", "potential"})
    kw: dict = {}
    if "sigma_list" in d:
        kw["sigma_list"] = _numbers(d["sigma_list"], "sigma_list", nonneg=True)
    if "lambda_list" in d:
        kw["lambda_list"] = _numbers(d["lambda_list"], "lambda_list", positive=True)
    if "mesh" in d:
        kw["mesh"] = parse_mesh(d["mesh"])
    if "tolerances" in d:
        td = _mapping(d["tolerances"], "tolerances", {"eig_tol", "quad_tol", "count_eps"})
        eig = _number(td.get("eig_tol", DEFAULT_EIG_TOL), "tolerances.eig_tol", positive=True)
        quad = _number(td.get("quad_tol", DEFAULT_QUAD_TOL), "tolerances.quad_tol", positive=True)
        eps = _number(td.get("count_eps", 10 * eig), "tolerances.count_eps", nonneg=True)
        kw["tolerances"] = Tolerances(eig, quad, eps)
    if "outputs" in d:
        od = _mapping(d["outputs"], "outputs", {"format", "path"})
        fmt = od.get("format", "json")
        if fmt not in ("json", "csv"):
            raise ConfigError("outputs.format", "expected 'json' or 'csv'")
        p = od.get("path", "out")
        if not isinstance(p, str) or not p:
            raise ConfigError("outputs.path", "expected a non-empty string")
        kw["outputs"] = Outputs(fmt, p)
    if "workers" in d:
        kw["workers"] = _integer(d["workers"], "workers", minimum=1)
    if "battery" in d:
        kw["battery"] = _parse_battery(d["battery"])
    return ExperimentConfig(parse_field(d["field"]), parse_potential(d["potential"]), source=source, raw=obj, **kw)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_config(obj, str(path))
