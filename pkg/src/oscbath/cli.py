"""Command-line front end: configuration, sweep orchestration, CSV/JSON
outputs.

All frequencies in a config are expressed in units of the Lorentzian
width gamma (gamma = 1 internally); summary files echo that convention.
Numeric CSV content is written at full precision so regression diffs are
exact, and sweep output is byte-identical for any worker count.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import copy
import csv
import json
import math
import sys
import traceback
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from scipy.integrate import trapezoid

from . import bath as bath_mod
from . import fitting, propagator, rates, spectrum as spectrum_mod
from . import phase as phase_mod
from . import specfun
from .phase import ModulationShape, ModulationSpec
from .quadrature import ConvergenceError

__all__ = ["main", "entry", "ConfigError", "run_selftest", "DEFAULT_CONFIG"]

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2

NUM_FMT = "%.16e"  # 17 significant digits

DEFAULT_CONFIG: Dict[str, Any] = {
    "reservoir": {"omega0": 1000.0, "gamma": 1.0, "weight": 0.1},
    "modulation": {"shape": "none", "depth": 0.0, "omega_mod": 0.0, "table": None},
    "grid": {"half_window": None, "spacing": None},
    "sim": {
        "enabled": True,
        "t_final": None,
        "dt": None,
        "store_stride": None,
        "pop_floor": 1e-3,
    },
    "rates": {"n_max": None},
    "sweep": {
        "parameter": None,
        "start": None,
        "stop": None,
        "count": None,
        "simulate": False,
    },
    "output_dir": "out",
    "workers": 1,
}


class ConfigError(ValueError):
    """Invalid run configuration."""


# ---------------------------------------------------------------------------
# configuration handling


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in out:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(out[key], dict) and isinstance(value, dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def set_by_path(cfg: dict, dotted: str, raw: str) -> None:
    """Apply a --set key=value override; values parse as JSON, falling
    back to a bare string."""
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    parts = dotted.split(".")
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            raise ConfigError(f"unknown config path {dotted!r}")
        node = node[part]
    if parts[-1] not in node:
        raise ConfigError(f"unknown config path {dotted!r}")
    node[parts[-1]] = value


def load_config(path: Optional[str], overrides: List[str]) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        cfg = _deep_merge(cfg, user)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        dotted, raw = item.split("=", 1)
        set_by_path(cfg, dotted, raw)
    return cfg


def build_reservoir(cfg: dict) -> bath_mod.ReservoirSpec:
    sec = cfg["reservoir"]
    try:
        return bath_mod.ReservoirSpec(
            omega0=float(sec["omega0"]),
            gamma=float(sec["gamma"]),
            weight=float(sec["weight"]),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"reservoir section invalid: {exc}") from exc


def build_modulation(cfg: dict) -> ModulationSpec:
    sec = cfg["modulation"]
    try:
        shape = ModulationShape(str(sec["shape"]).lower())
        table = sec.get("table")
        if table is not None:
            table = tuple((float(a), float(b)) for a, b in table)
        return ModulationSpec(
            shape=shape,
            depth=float(sec["depth"]),
            omega_mod=float(sec["omega_mod"]),
            table=table,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"modulation section invalid: {exc}") from exc


def build_grid(cfg: dict, res, mod) -> bath_mod.GridSpec:
    sec = cfg["grid"]
    auto = bath_mod.default_grid(res, mod)
    try:
        half_window = sec["half_window"]
        spacing = sec["spacing"]
        return bath_mod.GridSpec(
            half_window=auto.half_window if half_window is None else float(half_window),
            spacing=auto.spacing if spacing is None else float(spacing),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"grid section invalid: {exc}") from exc


def build_sim_config(cfg: dict, bath, gamma_total: float) -> propagator.SimConfig:
    sec = cfg["sim"]
    pop_floor = float(sec["pop_floor"])
    dt = float(sec["dt"]) if sec["dt"] is not None else propagator.default_dt(bath)
    if sec["t_final"] is not None:
        t_final = float(sec["t_final"])
    else:
        mod = bath.modulation
        transient = 3.0 * mod.period if mod.shape is not ModulationShape.NONE else 3.0
        horizon = transient + math.log(1.0 / pop_floor) / max(gamma_total, 1e-12)
        t_final = min(horizon, 0.49 * bath.recurrence_time)
    if sec["store_stride"] is not None:
        stride = int(sec["store_stride"])
    else:
        n_steps = max(1, int(round(t_final / dt)))
        stride = max(1, n_steps // 20000)
    try:
        return propagator.SimConfig(t_final=t_final, dt=dt, store_stride=stride)
    except ValueError as exc:
        raise ConfigError(f"sim section invalid: {exc}") from exc


# ---------------------------------------------------------------------------
# output helpers


def _write_csv(path: Path, header: List[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [
                    NUM_FMT % v if isinstance(v, float) else v
                    for v in row
                ]
            )


def _write_json(path: Path, payload: dict) -> None:
    payload = dict(payload)
    payload["units"] = "angular frequencies in units of gamma (gamma = 1)"
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# pipelines


def analytic_summary(cfg: dict):
    """Rate breakdown plus the rival-model numbers for one parameter set."""
    res = build_reservoir(cfg)
    mod = build_modulation(cfg)
    n_max = cfg["rates"]["n_max"]
    breakdown = rates.total_rate(res, mod, n_max=None if n_max is None else int(n_max))
    d = mod.depth
    omega = mod.omega_mod if mod.shape is not ModulationShape.NONE else None
    if omega is not None:
        det = rates.detuning_rates(res, d, omega, n_max=None if n_max is None else int(n_max))
        ultra = rates.ultrafast_rate(res, d, omega)
        ultra_prime = rates.static_rate(res) * specfun.bessel_j(0, d / omega) ** 2
    else:
        g0 = rates.static_rate(res)
        det = rates.DetuningRates(gamma_n_prime={0: g0}, gamma_total_prime=g0)
        ultra = g0
        ultra_prime = g0
    ratio = rates.suppression_ratio(d / res.gamma)
    return res, mod, breakdown, det, ultra, ultra_prime, ratio


def run_rates(cfg: dict, out_dir: Path) -> dict:
    res, mod, breakdown, det, ultra, ultra_prime, ratio = analytic_summary(cfg)
    ns = sorted(set(breakdown.gamma_n) | set(det.gamma_n_prime))
    _write_csv(
        out_dir / "rates.csv",
        ["n", "gamma_n", "gamma_n_prime"],
        [
            (n, breakdown.gamma_n.get(n, 0.0), det.gamma_n_prime.get(n, 0.0))
            for n in ns
        ],
    )
    summary = {
        "gamma_total": breakdown.gamma_total,
        "gamma_total_prime": det.gamma_total_prime,
        "ultrafast_rate": ultra,
        "ultrafast_rate_prime": ultra_prime,
        "suppression_ratio": ratio,
        "validity": breakdown.validity.value,
        "static_rate": rates.static_rate(res),
    }
    _write_json(out_dir / "summary.json", summary)
    return summary


def simulate_point(cfg: dict):
    """Full pipeline for one parameter point: bath, propagation, decay
    fit, occupation spectrum, peak table, analytic breakdown."""
    res, mod, breakdown, det, ultra, ultra_prime, ratio = analytic_summary(cfg)
    grid = build_grid(cfg, res, mod)
    discrete = bath_mod.build_bath(res, mod, grid)
    sim_cfg = build_sim_config(cfg, discrete, breakdown.gamma_total)
    result = propagator.propagate(discrete, sim_cfg)
    series = propagator.excited_population(result)

    if mod.shape is not ModulationShape.NONE:
        period = mod.period
    else:
        period = 1.0 / res.gamma  # correlation time stands in for a cycle
    fit = fitting.fit_decay_rate(
        series, period=period, pop_floor=float(cfg["sim"]["pop_floor"])
    )
    spec = spectrum_mod.occupation_spectrum(result, discrete)

    if mod.shape is not ModulationShape.NONE:
        n_reach = int(discrete.half_window // mod.omega_mod)
        table = spectrum_mod.peak_weights(spec, mod.omega_mod, range(-n_reach, n_reach + 1))
    else:
        central = spectrum_mod.fit_lorentzian(
            spec, 0.0, min(5.0 * res.gamma, 0.5 * discrete.half_window)
        )
        table = spectrum_mod.PeakTable(
            rows=[spectrum_mod.PeakRow(0, 0.0, spec.total, central.half_width)],
            out_of_bin=0.0,
        )
    return {
        "reservoir": res,
        "modulation": mod,
        "bath": discrete,
        "sim_config": sim_cfg,
        "result": result,
        "series": series,
        "fit": fit,
        "spectrum": spec,
        "peaks": table,
        "breakdown": breakdown,
        "detuning": det,
        "ultrafast": ultra,
        "ultrafast_prime": ultra_prime,
        "suppression_ratio": ratio,
    }


def run_simulate(cfg: dict, out_dir: Path) -> dict:
    point = simulate_point(cfg)
    result = point["result"]
    _write_csv(
        out_dir / "trajectory.csv",
        ["t", "re_ca", "im_ca", "population"],
        [
            (float(t), float(c.real), float(c.imag), float(abs(c) ** 2))
            for t, c in zip(result.times, result.c_a)
        ],
    )
    spec = point["spectrum"]
    _write_csv(
        out_dir / "spectrum.csv",
        ["detuning", "S_value"],
        zip(map(float, spec.freqs), map(float, spec.values)),
    )
    _write_csv(
        out_dir / "peaks.csv",
        ["n", "center", "weight", "half_width"],
        [
            (row.n, row.center, row.weight, row.half_width)
            for row in point["peaks"].rows
        ],
    )
    summary = {
        "fitted_rate": point["fit"].rate,
        "fit_rms_residual": point["fit"].rms_residual,
        "fit_window": list(point["fit"].window),
        "gamma_total": point["breakdown"].gamma_total,
        "gamma_total_prime": point["detuning"].gamma_total_prime,
        "validity": point["breakdown"].validity.value,
        "norm_drift": result.norm_drift,
        "residual_population": float(abs(result.c_a[-1]) ** 2),
        "spectrum_total": spec.total,
        "n_modes": point["bath"].n_modes,
        "t_final": point["sim_config"].t_final,
        "dt": point["sim_config"].dt,
    }
    _write_json(out_dir / "summary.json", summary)
    return summary


SWEEP_PEAK_ORDERS = (0, 1, 2, 3)


def _sweep_point(args):
    cfg, value = args
    row: Dict[str, Any] = {"value": value, "status": "ok"}
    try:
        res, mod, breakdown, det, ultra, ultra_prime, ratio = analytic_summary(cfg)
        row["gamma_total"] = breakdown.gamma_total
        row["gamma_total_prime"] = det.gamma_total_prime
        total = breakdown.gamma_total
        for n in SWEEP_PEAK_ORDERS:
            row[f"w{n}_analytic"] = breakdown.gamma_n.get(n, 0.0) / total
        if cfg["sweep"]["simulate"]:
            point = simulate_point(cfg)
            row["rate_sim"] = point["fit"].rate
            weights = point["peaks"].weights
            for n in SWEEP_PEAK_ORDERS:
                row[f"s{n}_sim"] = weights.get(n, float("nan"))
        else:
            row["rate_sim"] = float("nan")
            for n in SWEEP_PEAK_ORDERS:
                row[f"s{n}_sim"] = float("nan")
    except Exception as exc:  # noqa: BLE001 - per-point failures become rows
        row["status"] = f"failed: {exc}"
        for key in (
            ["gamma_total", "gamma_total_prime", "rate_sim"]
            + [f"w{n}_analytic" for n in SWEEP_PEAK_ORDERS]
            + [f"s{n}_sim" for n in SWEEP_PEAK_ORDERS]
        ):
            row.setdefault(key, float("nan"))
    return row


def run_sweep(cfg: dict, out_dir: Path, workers: int) -> dict:
    sweep = cfg["sweep"]
    if sweep["parameter"] is None:
        raise ConfigError("sweep section missing 'parameter'")
    for key in ("start", "stop", "count"):
        if sweep[key] is None:
            raise ConfigError(f"sweep section missing {key!r}")
    count = int(sweep["count"])
    if count < 2:
        raise ConfigError("sweep count must be at least 2")
    start = float(sweep["start"])
    stop = float(sweep["stop"])
    if stop <= start:
        raise ConfigError("sweep range must be non-empty (stop > start)")
    values = np.linspace(start, stop, count)

    jobs = []
    for value in values:
        point_cfg = copy.deepcopy(cfg)
        set_by_path(point_cfg, sweep["parameter"], repr(float(value)))
        jobs.append((point_cfg, float(value)))

    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(job) for job in jobs]
    rows.sort(key=lambda row: row["value"])

    header = (
        [sweep["parameter"], "gamma_total", "gamma_total_prime", "rate_sim"]
        + [f"w{n}_analytic" for n in SWEEP_PEAK_ORDERS]
        + [f"s{n}_sim" for n in SWEEP_PEAK_ORDERS]
        + ["status"]
    )
    _write_csv(
        out_dir / "sweep.csv",
        header,
        [
            tuple(
                [row["value"], row["gamma_total"], row["gamma_total_prime"], row["rate_sim"]]
                + [row[f"w{n}_analytic"] for n in SWEEP_PEAK_ORDERS]
                + [row[f"s{n}_sim"] for n in SWEEP_PEAK_ORDERS]
                + [row["status"]]
            )
            for row in rows
        ],
    )
    failures = [row for row in rows if row["status"] != "ok"]
    summary = {
        "parameter": sweep["parameter"],
        "count": count,
        "failures": len(failures),
        "failed_values": [row["value"] for row in failures],
    }
    _write_json(out_dir / "summary.json", summary)
    if failures:
        raise RuntimeError(f"{len(failures)} sweep point(s) failed")
    return summary


# ---------------------------------------------------------------------------
# selftest


def run_selftest(verbose: bool = True) -> List[dict]:
    """Reduced-scale invariant suite; each check reports its tolerance and
    measured value.  Functions are looked up through their modules at call
    time so a corrupted implementation fails its own check only."""
    checks: List[dict] = []

    def record(name, tolerance, measured, passed):
        checks.append(
            {"name": name, "tolerance": tolerance, "measured": measured,
             "passed": bool(passed)}
        )

    def guarded(name, tolerance, fn):
        try:
            measured, passed = fn()
        except Exception as exc:  # noqa: BLE001
            record(name, tolerance, f"error: {exc}", False)
        else:
            record(name, tolerance, measured, passed)

    def check_bessel_zero():
        err = abs(specfun.bessel_j(0, 2.404825557695773))
        return err, err < 1e-12

    guarded("bessel_j first zero", 1e-12, check_bessel_zero)

    def check_bessel_parseval():
        x = 7.3
        total = sum(specfun.bessel_j(n, x) ** 2 for n in range(-30, 31))
        err = abs(1.0 - total)
        return err, err < 1e-10

    guarded("bessel_j Parseval sum", 1e-10, check_bessel_parseval)

    def check_elliptic():
        # independent oracle: trapezoid quadrature of the defining integral
        theta = np.linspace(0.0, 0.5 * math.pi, 20001)
        m = 0.5
        oracle = trapezoid(1.0 / np.sqrt(1.0 - m * np.sin(theta) ** 2), theta)
        err = abs(specfun.elliptic_k(m) - oracle) / oracle
        return err, err < 1e-10

    guarded("elliptic_k vs defining integral", 1e-10, check_elliptic)

    def check_parseval_phase():
        mod = ModulationSpec.sinusoid(depth=34.0, omega_mod=10.0)
        power = phase_mod.fourier_coefficients(mod).power_sum
        return 1.0 - power, 1.0 - 1e-8 <= power <= 1.0 + 1e-12

    guarded("phase Parseval sum", 1e-8, check_parseval_phase)

    def check_static_rate():
        res = bath_mod.ReservoirSpec(omega0=1000.0, gamma=1.0, weight=0.5)
        mod = ModulationSpec.sinusoid(depth=0.0, omega_mod=5.0)
        got = rates.total_rate(res, mod).gamma_total
        err = abs(got - 0.5) / 0.5
        return err, err < 1e-10

    guarded("static limit of total rate", 1e-10, check_static_rate)

    def check_rate_oracles():
        res = bath_mod.ReservoirSpec(omega0=1000.0, gamma=1.0, weight=1.0)
        mod = ModulationSpec.sinusoid(depth=30.0, omega_mod=20.0)
        worst = 0.0
        for n in (0, 1, 2):
            a = rates.sideband_rate(res, mod, n)
            b = rates.bessel_sum_rate(res, 30.0, 20.0, n)
            worst = max(worst, abs(a - b) / max(a, b))
        return worst, worst < 1e-8

    guarded("sideband vs Bessel-sum rate", 1e-8, check_rate_oracles)

    def check_ratio_identity():
        res = bath_mod.ReservoirSpec(omega0=1000.0, gamma=1.0, weight=0.1)
        d, omega = 5.0, 500.0
        ultra = rates.ultrafast_rate(res, d, omega)
        prime = rates.static_rate(res) * specfun.bessel_j(0, d / omega) ** 2
        err = abs(ultra / prime - rates.suppression_ratio(d)) / rates.suppression_ratio(d)
        return err, err < 1e-12

    guarded("suppression ratio identity", 1e-12, check_ratio_identity)

    def check_microwave_ratio():
        got = rates.suppression_ratio(1000.0)
        err = abs(got - 2.8e-5) / 2.8e-5
        return err, err < 0.05

    guarded("deep suppression ratio", 0.05, check_microwave_ratio)

    def check_flat_golden_rule():
        level = 0.02
        mod = ModulationSpec.sinusoid(depth=8.0, omega_mod=5.0)
        grid = bath_mod.GridSpec(half_window=25.0, spacing=0.05)
        flat = bath_mod.build_flat_bath(level, mod, grid)
        cfg = propagator.SimConfig(
            t_final=40.0, dt=propagator.default_dt(flat), store_stride=50
        )
        run = propagator.propagate(flat, cfg)
        fit = fitting.fit_decay_rate(
            propagator.excited_population(run), period=mod.period
        )
        expected = 2.0 * math.pi * level
        err = abs(fit.rate - expected) / expected
        return err, err < 0.02

    guarded("flat-reservoir golden rule", 0.02, check_flat_golden_rule)

    if verbose:
        for chk in checks:
            status = "PASS" if chk["passed"] else "FAIL"
            print(
                f"{status}  {chk['name']}: measured {chk['measured']} "
                f"(tolerance {chk['tolerance']})"
            )
    return checks


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscbath",
        description=(
            "Spontaneous-emission control with oscillating reservoir "
            "mode-structures: simulation, analytic rates, sweeps"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("simulate", "propagate one configuration and dump trajectory/spectrum"),
        ("rates", "analytic sideband and rival-model rates"),
        ("sweep", "sweep one parameter, analytic and optionally simulated"),
        ("selftest", "run the reduced-scale invariant suite"),
    ):
        cmd = sub.add_parser(name, help=doc)
        cmd.add_argument("--config", help="JSON config file")
        cmd.add_argument("--out", help="output directory (overrides config)")
        cmd.add_argument("--workers", type=int, help="parallel sweep workers")
        cmd.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config leaf via dotted path (repeatable)",
        )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
        if args.out is not None:
            cfg["output_dir"] = args.out
        if args.workers is not None:
            cfg["workers"] = int(args.workers)

        if args.command == "selftest":
            checks = run_selftest()
            failed = [c for c in checks if not c["passed"]]
            if failed:
                print(f"{len(failed)} selftest check(s) FAILED", file=sys.stderr)
                return EXIT_RUNTIME
            print(f"all {len(checks)} selftest checks passed")
            return EXIT_OK

        out_dir = Path(cfg["output_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            summary = run_simulate(cfg, out_dir)
            print(json.dumps(summary, indent=2, sort_keys=True))
        elif args.command == "rates":
            summary = run_rates(cfg, out_dir)
            print(json.dumps(summary, indent=2, sort_keys=True))
        elif args.command == "sweep":
            summary = run_sweep(cfg, out_dir, int(cfg["workers"]))
            print(json.dumps(summary, indent=2, sort_keys=True))
        return EXIT_OK
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RuntimeError, ConvergenceError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return EXIT_RUNTIME


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
