import csv
import json
from pathlib import Path

import pytest

from magspec.cli import main
from magspec.config import load_config, parse_config
from magspec.errors import ConfigError
from magspec.io import dumps

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

BASE = {
    "field": {"M": 1, "alpha": 2},
    "potential": {"name": "step", "profile": {"kind": "step", "params": {"V0": 25, "r0": 0.5}}},
    "sigma_list": [1],
    "mesh": {"n": 512, "kind": "graded", "grading": 2.0},
}


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


class TestConfig:
    def test_defaults(self):
        cfg = parse_config(BASE)
        assert cfg.tolerances.eig_tol == 1e-10 and cfg.tolerances.count_eps == pytest.approx(1e-9)
        assert cfg.workers == 1 and cfg.outputs.format == "json"

    @pytest.mark.parametrize("patch, key", [
        ({"sigmas": [1]}, "sigmas"),
        ({"mesh": {"n": 512, "knd": "graded"}}, "mesh.knd"),
        ({"field": {"M": 1, "alpha": 2, "beta": 1}}, "field.beta"),
        ({"field": {"M": 1, "alpha": 3}}, "field"),
        ({"potential": {"profile": {"kind": "step", "params": {"V0": 1, "r1": 0.5}}}}, "potential.profile.params.r1"),
        ({"potential": {"profile": {"kind": "step", "params": {"V0": 1, "r0": 0.5}}, "angular": {"b": 2}}},
         "potential.angular.b"),
        ({"tolerances": {"eig_tol": -1}}, "tolerances.eig_tol"),
        ({"outputs": {"format": "xml"}}, "outputs.format"),
        ({"workers": 0}, "workers"),
        ({"mesh": {"n": 8}}, "mesh.n"),
    ])
    def test_strict(self, patch, key):
        with pytest.raises(ConfigError) as exc:
            parse_config({**BASE, **patch})
        assert exc.value.key == key

    def test_missing_potential(self):
        with pytest.raises(ConfigError) as exc:
            parse_config({"field": "none"})
        assert exc.value.key == "potential"

    def test_field_none(self):
        assert parse_config({**BASE, "field": "none"}).field is None

    @pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.json")))
    def test_shipped_configs_parse(self, name):
        load_config(CONFIGS / name)

    def test_packaged_configs_match(self):
        from importlib import resources
        pkg = resources.files("magspec") / "configs"
        for p in CONFIGS.glob("*.json"):
            assert (pkg / p.name).read_text() == p.read_text()


class TestIO:
    def test_float_format(self):
        assert dumps({"x": 0.1}) == '{\n  "x": 0.10000000000000001\n}\n'

    def test_non_finite(self):
        assert json.loads(dumps([float("inf"), float("nan")])) == ["inf", "nan"]


class TestCommands:
    def test_config_error_exit(self, tmp_path, capsys):
        path = _write(tmp_path, {**BASE, "mesh": {"nn": 3}})
        assert main(["spectrum", "--config", path, "--out", str(tmp_path)]) == 2
        assert "mesh.nn" in capsys.readouterr().err

    def test_unreadable_config(self, tmp_path):
        assert main(["spectrum", "--config", str(tmp_path / "missing.json")]) == 2

    def test_invalid_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{")
        assert main(["spectrum", "--config", str(p)]) == 2

    def test_spectrum_json(self, tmp_path):
        assert main(["spectrum", "--config", _write(tmp_path, BASE), "--out", str(tmp_path)]) == 0
        rep = json.loads((tmp_path / "spectrum.json").read_text())
        assert rep["spectrum"]["count_negative"] >= 1

    def test_spectrum_csv(self, tmp_path):
        cfg = {**BASE, "outputs": {"format": "csv", "path": str(tmp_path / "o")}}
        assert main(["spectrum", "--config", _write(tmp_path, cfg)]) == 0
        rows = list(csv.reader((tmp_path / "o" / "spectrum.csv").open()))
        assert rows[0] == ["m", "k", "lambda"] and len(rows) >= 2

    def test_bounds_zero_potential(self, tmp_path):
        cfg = {**BASE, "potential": {"profile": {"kind": "step", "params": {"V0": 0, "r0": 1}}}, "sigma_list": [0, 1]}
        assert main(["bounds", "--config", _write(tmp_path, cfg), "--out", str(tmp_path)]) == 0
        rep = json.loads((tmp_path / "bounds.json").read_text())
        for r in rep["reports"]:
            assert r["lhs"] == 0 and r["slack"] == r["rhs"]

    def test_bounds_csv_columns(self, tmp_path):
        cfg = {**BASE, "sigma_list": [0.5, 1, 2], "outputs": {"format": "csv", "path": str(tmp_path)}}
        assert main(["bounds", "--config", _write(tmp_path, cfg)]) == 0
        rows = list(csv.DictReader((tmp_path / "bounds.csv").open()))
        assert list(rows[0]) == ["alpha", "M", "potential_id", "sigma", "gamma", "C", "lhs", "rhs", "slack"]
        assert len(rows) == 4 and all(float(r["slack"]) >= 0 for r in rows)

    def test_weyl_csv(self, tmp_path):
        cfg = {"field": "none", "potential": {"profile": {"kind": "step", "params": {"V0": 1, "r0": 1}}},
               "sigma_list": [1], "lambda_list": [100, 1000, 3000], "mesh": {"n": 1024, "kind": "uniform"},
               "outputs": {"format": "csv", "path": str(tmp_path)}}
        assert main(["weyl", "--config", _write(tmp_path, cfg), "--workers", "2"]) == 0
        rows = list(csv.DictReader((tmp_path / "weyl.csv").open()))
        ratios = [float(r["ratio"]) for r in rows]
        assert len(rows) == 3 and ratios == sorted(ratios) and ratios[-1] < 1

    def test_weyl_needs_no_field(self, tmp_path):
        assert main(["weyl", "--config", _write(tmp_path, BASE)]) == 2

    def test_flux(self, tmp_path):
        assert main(["flux", "--config", _write(tmp_path, BASE), "--out", str(tmp_path)]) == 0
        rep = json.loads((tmp_path / "flux.json").read_text())
        assert rep["phi_at_one"] == "inf" and rep["radii"][0]["case"] == "BothInside"

    def test_verify_single_case(self, tmp_path):
        cfg = {**BASE, "field": {"M": 1, "alpha": 1.5}}
        assert main(["verify", "--config", _write(tmp_path, cfg), "--out", str(tmp_path)]) == 0
        rep = json.loads((tmp_path / "verify.json").read_text())
        assert rep["passed"] and rep["n_failed"] == 0

    def test_verify_failure_exit(self, tmp_path, monkeypatch):
        import magspec.battery as battery
        monkeypatch.setattr(battery, "GAP_FLOOR", 1e9)  # impossible floor forces a failed check
        cfg = {**BASE, "field": {"M": 1, "alpha": 1.5}}
        assert main(["verify", "--config", _write(tmp_path, cfg), "--out", str(tmp_path)]) == 1

    def test_nonconvergence_exit(self, tmp_path, monkeypatch):
        import magspec.cli as cli
        from magspec.errors import NonConvergence

        def boom(*a, **k):
            raise NonConvergence("forced")
        monkeypatch.setitem(cli.COMMANDS, "spectrum", boom)
        assert main(["spectrum", "--config", _write(tmp_path, BASE)]) == 3

    def test_deterministic(self, tmp_path):
        path = _write(tmp_path, {**BASE, "sigma_list": [0.5, 1]})
        main(["bounds", "--config", path, "--out", str(tmp_path / "a"), "--workers", "1"])
        main(["bounds", "--config", path, "--out", str(tmp_path / "b"), "--workers", "3"])
        assert (tmp_path / "a" / "bounds.json").read_bytes() == (tmp_path / "b" / "bounds.json").read_bytes()
