"""Render the per-keyword precision summary as a figure.

One horizontal interval per keyword next to the CSV the numbers came
from. Uses the Agg backend; PNG metadata is pinned so repeated runs
produce identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .stats import SummaryRow


def render_summary_figure(rows: list[SummaryRow], path: str | Path, title: str = "Label precision by keyword") -> None:
    plotted = [r for r in rows if r.ci is not None]
    skipped = len(rows) - len(plotted)

    fig, ax = plt.subplots(figsize=(7, max(2.0, 0.32 * len(plotted) + 1.2)))
    ys = range(len(plotted))
    for y, row in enumerate(plotted):
        ci = row.ci
        assert ci is not None
        if ci.point_only:
            ax.plot([ci.p_hat], [y], marker="o", color="#888888", markersize=4)
        else:
            ax.hlines(y, ci.lower, ci.upper, color="#3465a4", lw=2)
            ax.plot([ci.p_hat], [y], marker="o", color="#204a87", markersize=4)
    ax.set_yticks(list(ys))
    ax.set_yticklabels([f"{r.keyword} ({r.n_correct}/{r.n_sampled} of {r.n_positive})" for r in plotted], fontsize=8)
    ax.set_xlim(-0.02, 1.02)
    ax.set_xlabel("precision")
    label = title if not skipped else f"{title} ({skipped} keyword(s) without samples omitted)"
    ax.set_title(label, fontsize=10)
    ax.invert_yaxis()
    ax.grid(axis="x", color="#dddddd", lw=0.5)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": "radlabel"})
    plt.close(fig)
