"""Figures written next to the CSV/JSON reports.

Uses the non-interactive Agg backend; files carry no timestamp metadata so
repeated runs produce identical bytes.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .grid import Dist1D  # noqa: E402

golden_mean = (math.sqrt(5) - 1.0) / 2.0
fig_width = 6.0

params = {
    "axes.labelsize": 10,
    "font.size": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "lines.linewidth": 1.2,
    "lines.markersize": 4,
    "figure.dpi": 100,
}


def _save(fig, path: str | Path) -> None:
    fmt = Path(path).suffix.lstrip(".").lower() or "png"
    meta = {"Software": None} if fmt == "png" else {}
    if fmt in ("pdf", "svg"):
        meta = {"Creator": None, "Date": None} if fmt == "pdf" else {"Date": None}
    fig.savefig(path, format=fmt, metadata=meta)
    plt.close(fig)


def plot_beta_scan(rows: Sequence[Mapping], path: str | Path, title: str = "") -> None:
    """Bound and left-hand side versus beta (top), margin versus beta (bottom)."""
    beta = [r["beta"] for r in rows]
    with plt.rc_context(params):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True,
                                       figsize=(fig_width, fig_width * golden_mean * 1.4))
        ax1.plot(beta, [r["bound"] for r in rows], "o-", label="bound")
        ax1.plot(beta, [r["lhs"] for r in rows], "s--", label=r"$H[w_\pm] + H[u_\mp]$")
        ax1.set_ylabel("entropy (nats)")
        ax1.legend(loc="best")
        ax1.grid(True, alpha=0.3)
        ax2.plot(beta, [r["margin"] for r in rows], "o-", color="C2")
        ax2.axhline(0.0, color="k", lw=0.6)
        ax2.set_xlabel(r"$\beta$")
        ax2.set_ylabel("margin")
        ax2.grid(True, alpha=0.3)
        positive = [b for b in beta if b > 0]
        if len(positive) == len(beta) and len(beta) > 2 and max(beta) / min(beta) > 50:
            ax2.set_xscale("log")
        if title:
            ax1.set_title(title)
        fig.tight_layout()
        _save(fig, path)


def plot_densities(dists: Mapping[str, Dist1D], path: str | Path, xlabel: str = "",
                   title: str = "", cutoff: float = 1e-6) -> None:
    """Overlay densities, cropping the shared x range to where any exceeds ``cutoff``."""
    with plt.rc_context(params):
        fig, ax = plt.subplots(figsize=(fig_width, fig_width * golden_mean))
        lo, hi = math.inf, -math.inf
        for label, d in dists.items():
            x = d.axis.points
            ax.plot(x, d.values, label=label)
            big = x[d.values > cutoff * d.values.max()]
            if big.size:
                lo, hi = min(lo, big[0]), max(hi, big[-1])
        if lo < hi:
            ax.set_xlim(lo, hi)
        ax.set_xlabel(xlabel)
        ax.set_ylabel("density")
        ax.legend(loc="best")
        ax.grid(True, alpha=0.3)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        _save(fig, path)
