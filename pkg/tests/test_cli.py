"""End-to-end tests of the command-line front end."""

import csv
import json
import math
import sys

import numpy as np
import pytest

from oscbath import cli
from oscbath.cli import (
    ConfigError,
    load_config,
    main,
    run_selftest,
    set_by_path,
)


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


FAST_SIM = [
    "reservoir.weight=0.3",
    "modulation.shape=sinusoid",
    "modulation.depth=5.0",
    "modulation.omega_mod=5.0",
    "grid.half_window=30.0",
    "grid.spacing=0.02",
    "sim.t_final=150.0",
]


class TestConfig:
    def test_defaults(self):
        cfg = load_config(None, [])
        assert cfg["reservoir"]["gamma"] == 1.0
        assert cfg["modulation"]["shape"] == "none"

    def test_file_merge(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"reservoir": {"weight": 0.5}, "workers": 3}))
        cfg = load_config(str(p), [])
        assert cfg["reservoir"]["weight"] == 0.5
        assert cfg["reservoir"]["gamma"] == 1.0  # untouched default
        assert cfg["workers"] == 3

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"resevoir": {"weight": 0.5}}))
        with pytest.raises(ConfigError):
            load_config(str(p), [])

    def test_set_override(self):
        cfg = load_config(None, ["modulation.depth=4.5", "output_dir=elsewhere"])
        assert cfg["modulation"]["depth"] == 4.5
        assert cfg["output_dir"] == "elsewhere"

    def test_set_bad_path(self):
        cfg = load_config(None, [])
        with pytest.raises(ConfigError):
            set_by_path(cfg, "modulation.nope", "1")

    def test_malformed_json(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text("{not json")
        assert main(["rates", "--config", str(p)]) == 2


class TestRatesCommand:
    def test_outputs(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(
            [
                "rates",
                "--out",
                str(out),
                "--set",
                "modulation.shape=sinusoid",
                "--set",
                "modulation.depth=30.0",
                "--set",
                "modulation.omega_mod=20.0",
            ]
        )
        assert code == 0
        header, rows = read_csv(out / "rates.csv")
        assert header == ["n", "gamma_n", "gamma_n_prime"]
        ns = [int(r[0]) for r in rows]
        assert 0 in ns and min(ns) < 0 < max(ns)
        summary = json.loads((out / "summary.json").read_text())
        assert summary["gamma_total"] > 0
        assert summary["gamma_total"] <= summary["gamma_total_prime"]
        assert "units" in summary

    def test_full_precision_numbers(self, tmp_path):
        out = tmp_path / "out"
        assert main(["rates", "--out", str(out)]) == 0
        _, rows = read_csv(out / "rates.csv")
        # 17 significant digits: mantissa with 16 decimals
        assert any("e" in cell and len(cell.split("e")[0]) >= 18 for cell in rows[0][1:])


class TestSimulateCommand:
    @pytest.fixture(scope="class")
    @classmethod
    def sim_out(cls, tmp_path_factory):
        out = tmp_path_factory.mktemp("sim")
        args = ["simulate", "--out", str(out)]
        for s in FAST_SIM:
            args += ["--set", s]
        assert main(args) == 0
        return out

    def test_trajectory(self, sim_out):
        header, rows = read_csv(sim_out / "trajectory.csv")
        assert header == ["t", "re_ca", "im_ca", "population"]
        first = [float(x) for x in rows[0]]
        assert first[0] == 0.0 and first[3] == pytest.approx(1.0)
        pops = np.array([float(r[3]) for r in rows])
        assert pops[-1] < 0.05

    def test_spectrum_and_peaks(self, sim_out):
        header, rows = read_csv(sim_out / "spectrum.csv")
        assert header == ["detuning", "S_value"]
        total = sum(float(r[1]) for r in rows) * 0.02
        assert total == pytest.approx(1.0, abs=0.05)
        header, rows = read_csv(sim_out / "peaks.csv")
        assert header == ["n", "center", "weight", "half_width"]
        weights = {int(r[0]): float(r[2]) for r in rows}
        assert sum(weights.values()) == pytest.approx(1.0, abs=0.05)

    def test_summary(self, sim_out):
        summary = json.loads((sim_out / "summary.json").read_text())
        assert summary["fitted_rate"] == pytest.approx(
            summary["gamma_total"], rel=0.05
        )
        assert summary["norm_drift"] < 1e-6


class TestSweepCommand:
    def base_args(self, out, workers):
        args = [
            "sweep",
            "--out",
            str(out),
            "--workers",
            str(workers),
            "--set",
            "modulation.shape=sinusoid",
            "--set",
            "modulation.omega_mod=20.0",
            "--set",
            "modulation.depth=1.0",
            "--set",
            "sweep.parameter=modulation.depth",
            "--set",
            "sweep.start=5.0",
            "--set",
            "sweep.stop=40.0",
            "--set",
            "sweep.count=5",
        ]
        return args

    def test_analytic_sweep_and_determinism(self, tmp_path):
        out1 = tmp_path / "w1"
        out2 = tmp_path / "w2"
        assert main(self.base_args(out1, 1)) == 0
        assert main(self.base_args(out2, 2)) == 0
        # byte-identical output regardless of worker count
        assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()
        header, rows = read_csv(out1 / "sweep.csv")
        assert header[0] == "modulation.depth"
        assert [float(r[0]) for r in rows] == sorted(float(r[0]) for r in rows)
        assert all(r[-1] == "ok" for r in rows)

    def test_missing_sweep_section(self, tmp_path):
        assert main(["sweep", "--out", str(tmp_path / "o")]) == 2

    def test_partial_failure_flagged(self, tmp_path):
        out = tmp_path / "fail"
        args = self.base_args(out, 1)
        # negative depths are invalid for part of the range
        args[args.index("sweep.start=5.0")] = "sweep.start=-10.0"
        code = main(args)
        assert code == 1
        _, rows = read_csv(out / "sweep.csv")
        statuses = [r[-1] for r in rows]
        assert any(s.startswith("failed") for s in statuses)
        assert any(s == "ok" for s in statuses)


class TestSelftest:
    def test_all_pass(self, capsys):
        assert main(["selftest"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_reports_name_tolerance_measured(self):
        checks = run_selftest(verbose=False)
        assert len(checks) >= 8
        for chk in checks:
            assert chk["name"]
            assert chk["tolerance"] is not None
            assert chk["measured"] is not None
            assert chk["passed"]

    def test_fault_injection_fails_only_that_check(self, monkeypatch, capsys):
        from oscbath import specfun

        monkeypatch.setattr(specfun, "elliptic_k", lambda m: 1.0)
        assert main(["selftest"]) == 1
        out = capsys.readouterr().out
        failed = [l for l in out.splitlines() if l.startswith("FAIL")]
        assert failed
        assert all("elliptic" in l or "ratio" in l for l in failed)
        passed = [l for l in out.splitlines() if l.startswith("PASS")]
        assert any("bessel" in l for l in passed)


def test_unknown_command():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
