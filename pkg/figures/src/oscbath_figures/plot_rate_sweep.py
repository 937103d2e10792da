"""Render rate-sweep figures from a sweep.csv file.

Three figure families share the sweep schema and are selected with
``--mode``:

* ``rates``      - analytic total rate as a line with simulated rates as
                   crosses (one panel).
* ``comparison`` - log-scale comparison of the mode-structure rate
                   against the variable-detuning rate (one panel; the
                   mode-structure curve is the lower one).
* ``weights``    - 2x2 grid of sideband weights S_n for n = 0..3,
                   analytic lines plus simulated markers where present.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, load_columns

__all__ = ["build_figure", "render", "main", "entry"]

MODES = ("rates", "comparison", "weights")
PEAK_ORDERS = (0, 1, 2, 3)


def _load_sweep(sweep_csv: str):
    with open(sweep_csv, newline="") as fh:
        first = fh.readline()
    if not first.strip():
        raise SchemaError(f"{sweep_csv}: file is empty")
    parameter = first.split(",")[0].strip()
    if not parameter or parameter == "status":
        raise SchemaError(f"{sweep_csv}: cannot identify the swept parameter column")
    numeric = (
        [parameter, "gamma_total", "gamma_total_prime", "rate_sim"]
        + [f"w{n}_analytic" for n in PEAK_ORDERS]
        + [f"s{n}_sim" for n in PEAK_ORDERS]
    )
    cols = load_columns(sweep_csv, numeric + ["status"], numeric=numeric)
    ok = np.array([s == "ok" for s in cols["status"]])
    if not ok.any():
        raise SchemaError(f"{sweep_csv}: no rows with status 'ok'")
    if not ok.all():
        print(
            f"warning: dropping {int((~ok).sum())} failed sweep rows",
            file=sys.stderr,
        )
    return parameter, {k: v[ok] for k, v in cols.items() if k != "status"}


def _xlabel(parameter: str) -> str:
    names = {
        "modulation.depth": r"$d/\gamma$",
        "modulation.omega_mod": r"$\Omega/\gamma$",
        "reservoir.weight": r"$D/\gamma$",
    }
    return names.get(parameter, parameter)


def build_figure(sweep_csv: str, mode: str):
    """Assemble the requested figure; raises :class:`SchemaError` on bad input."""
    if mode not in MODES:
        raise SchemaError(f"unknown mode {mode!r}; choose from {MODES}")
    parameter, cols = _load_sweep(sweep_csv)
    x = cols[parameter]
    order = np.argsort(x)
    x = x[order]

    if mode == "rates":
        fig, ax = plt.subplots(figsize=(5.2, 3.8))
        ax.plot(x, cols["gamma_total"][order], "C3-", lw=1.2, label=r"analytic $\Gamma_\infty$")
        sim = cols["rate_sim"][order]
        if np.isfinite(sim).any():
            ax.plot(x, sim, "C0x", ms=6, label="simulation")
        ax.set_ylabel(r"$\Gamma_\infty\,/\,\gamma$")
        ax.legend(frameon=False)
    elif mode == "comparison":
        fig, ax = plt.subplots(figsize=(5.2, 3.8))
        ax.semilogy(x, cols["gamma_total_prime"][order], "C1--", lw=1.2,
                    label=r"variable detuning $\Gamma'_\infty$")
        ax.semilogy(x, cols["gamma_total"][order], "C0-", lw=1.2,
                    label=r"mode structure $\Gamma_\infty$")
        ax.set_ylabel(r"decay rate $/\,\gamma$")
        ax.legend(frameon=False)
    else:
        fig, axes = plt.subplots(2, 2, figsize=(7.6, 5.6), sharex=True)
        for n, ax in zip(PEAK_ORDERS, axes.ravel()):
            ax.plot(x, cols[f"w{n}_analytic"][order], "C3-", lw=1.1,
                    label="analytic")
            sim = cols[f"s{n}_sim"][order]
            if np.isfinite(sim).any():
                ax.plot(x, sim, "C0x", ms=5, label="simulation")
            ax.set_ylabel(rf"$S_{{{n}}}$")
            ax.set_title(rf"$n = {n}$", fontsize=9)
            if n == 0:
                ax.legend(frameon=False, fontsize=8)
        for ax in axes[-1]:
            ax.set_xlabel(_xlabel(parameter))
        fig.tight_layout()
        return fig

    ax.set_xlabel(_xlabel(parameter))
    fig.tight_layout()
    return fig


def render(sweep_csv: str, mode: str, out_base: str) -> list:
    """Build the requested figure and write ``out_base``.png and .svg."""
    fig = build_figure(sweep_csv, mode)
    written = []
    for ext in ("png", "svg"):
        path = f"{out_base}.{ext}"
        fig.savefig(path, dpi=200)
        written.append(path)
    plt.close(fig)
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("sweep_csv", help="sweep.csv written by 'oscbath sweep'")
    parser.add_argument("--mode", choices=MODES, default="rates")
    parser.add_argument("--out", required=True,
                        help="output basename; .png and .svg are appended")
    args = parser.parse_args(argv)
    try:
        written = render(args.sweep_csv, args.mode, args.out)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
