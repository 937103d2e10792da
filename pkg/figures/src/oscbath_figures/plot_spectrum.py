"""Render the final reservoir occupation spectrum (two-panel figure).

Panel (a): the full spectrum with markers at the sideband centres taken
from peaks.csv.  Panel (b): a zoom on one peak with the fitted
Lorentzian overlay reconstructed from the tabulated weight and
half-width.  When peaks.csv is unavailable only panel (a) is drawn and
a warning is printed.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, load_columns

__all__ = ["build_figure", "render", "main", "entry"]


def _lorentzian(freqs: np.ndarray, center: float, weight: float, half_width: float):
    """Normalized Lorentzian carrying ``weight``: w*hw/pi / ((x-c)^2 + hw^2)."""
    return weight * half_width / math.pi / ((freqs - center) ** 2 + half_width**2)


def build_figure(
    spectrum_csv: str,
    peaks_csv: Optional[str],
    zoom_n: int = 0,
):
    """Assemble the matplotlib figure; raises :class:`SchemaError` on bad input."""
    spec = load_columns(spectrum_csv, ["detuning", "S_value"])
    freqs = spec["detuning"]
    values = spec["S_value"]

    peaks = None
    if peaks_csv is not None:
        try:
            peaks = load_columns(peaks_csv, ["n", "center", "weight", "half_width"])
        except SchemaError as exc:
            print(f"warning: ignoring peaks table ({exc})", file=sys.stderr)
    else:
        print("warning: no peaks table given; drawing panel (a) only", file=sys.stderr)

    n_panels = 2 if peaks is not None else 1
    fig, axes = plt.subplots(1, n_panels, figsize=(5.0 * n_panels, 3.6))
    axes = np.atleast_1d(axes)

    ax = axes[0]
    ax.plot(freqs, values, color="C0", lw=0.9)
    ax.set_xlabel(r"$(\omega - \omega_0)/\gamma$")
    ax.set_ylabel(r"$S(\omega)\,\gamma$")
    ax.set_title("(a) occupation spectrum")
    if peaks is not None:
        for c in peaks["center"]:
            ax.axvline(c, color="C3", lw=0.6, ls=":", alpha=0.7)

    if peaks is not None:
        orders = peaks["n"].astype(int)
        if zoom_n not in orders:
            raise SchemaError(f"requested zoom order n={zoom_n} not in peaks table")
        row = int(np.nonzero(orders == zoom_n)[0][0])
        center = float(peaks["center"][row])
        weight = float(peaks["weight"][row])
        hw = float(peaks["half_width"][row])

        ax = axes[1]
        window = 8.0 * hw if math.isfinite(hw) and hw > 0 else 0.05 * (freqs[-1] - freqs[0])
        mask = np.abs(freqs - center) <= window
        ax.plot(freqs[mask], values[mask], "C0.", ms=3, label="data")
        if math.isfinite(hw) and hw > 0:
            fine = np.linspace(center - window, center + window, 400)
            ax.plot(fine, _lorentzian(fine, center, weight, hw), "C3-", lw=1.0,
                    label="Lorentzian fit")
        ax.set_xlabel(r"$(\omega - \omega_0)/\gamma$")
        ax.set_ylabel(r"$S(\omega)\,\gamma$")
        ax.set_title(f"(b) peak $n={zoom_n}$")
        ax.legend(frameon=False, fontsize=8)

    fig.tight_layout()
    return fig


def render(
    spectrum_csv: str,
    peaks_csv: Optional[str],
    out_base: str,
    zoom_n: int = 0,
) -> list:
    """Build the figure and write ``out_base``.png and .svg.

    Returns the list of written paths.  Raises :class:`SchemaError` on
    malformed input.
    """
    fig = build_figure(spectrum_csv, peaks_csv, zoom_n=zoom_n)
    written = []
    for ext in ("png", "svg"):
        path = f"{out_base}.{ext}"
        fig.savefig(path, dpi=200)
        written.append(path)
    plt.close(fig)
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("spectrum_csv", help="spectrum.csv written by 'oscbath simulate'")
    parser.add_argument("--peaks", default=None, help="matching peaks.csv (optional)")
    parser.add_argument("--out", required=True,
                        help="output basename; .png and .svg are appended")
    parser.add_argument("--zoom-n", type=int, default=0,
                        help="sideband order shown in the zoom panel (default 0)")
    args = parser.parse_args(argv)
    try:
        written = render(args.spectrum_csv, args.peaks, args.out, zoom_n=args.zoom_n)
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
