"""Figure rendering for report files.

Figures are an opt-in companion to the JSON/CSV outputs (the CSV remains
the canonical hand-off); they are written next to the delimited files
with matplotlib's Agg backend so no display is needed.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .lab import SweepReport  # noqa: E402

# strip the default Software tag so repeated renders differ as little
# as possible
_PNG_META = {"Software": None}


def render_sweep_figure(report: SweepReport, path) -> None:
    """Projected counts per direction against the exceptional threshold."""
    idx = [r.dir_index for r in report.records]
    counts = [r.proj_cells for r in report.records]
    flagged = [r.flagged for r in report.records]

    fig, ax = plt.subplots(figsize=(8, 4.5))
    colors = ["#d62728" if f else "#1f77b4" for f in flagged]
    ax.bar(idx, counts, color=colors, width=0.8)
    ax.axhline(report.threshold, color="black", linestyle="--", linewidth=1.2,
               label=f"threshold {report.threshold:.4g}")
    ax.set_xlabel("direction index")
    ax.set_ylabel("projected cell count")
    ax.set_title(
        f"projection sweep: n={report.n}, m={report.m}, k={report.k}, "
        f"alpha={report.alpha:g}, eps={report.eps:g}, "
        f"exceptional fraction={report.exceptional_fraction:.4g}"
    )
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)


def render_frostman_figure(profile, kappa: float, path) -> None:
    """Concentration ratio per dyadic radius; profile is [(rho, ratio)]."""
    rhos = [p[0] for p in profile]
    ratios = [p[1] for p in profile]
    fig, ax = plt.subplots(figsize=(6.5, 4))
    ax.plot([math.log2(r) for r in rhos], ratios, marker="o")
    ax.axhline(1.0, color="gray", linestyle=":", linewidth=1)
    ax.set_xlabel("log2 rho")
    ax.set_ylabel(f"max count / (rho^{kappa:g} N)")
    ax.set_title("local concentration profile")
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
