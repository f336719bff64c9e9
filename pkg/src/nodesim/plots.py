"""Figure rendering for the report paths (evaluate, sweep, case-study).

Figures are written next to the delimited/JSON output with the Agg
backend, so the CLI works on headless machines.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SLICE_COLORS = {"auc_total": "#444444", "auc_intra": "#1f77b4", "auc_inter": "#d62728"}
_SLICE_LABELS = {"auc_total": "total", "auc_intra": "intra", "auc_inter": "inter"}


def eval_report_figure(report, path) -> None:
    """Bar chart of mean total/intra/inter AUC with per-run dots."""
    fig, ax = plt.subplots(figsize=(5, 3.4))
    mean = report.mean()
    keys = ["auc_total", "auc_intra", "auc_inter"]
    xs = np.arange(len(keys))
    heights = [mean[k] if mean[k] is not None else 0.0 for k in keys]
    ax.bar(xs, heights, color=[_SLICE_COLORS[k] for k in keys], width=0.6, alpha=0.8)
    for i, key in enumerate(keys):
        values = [getattr(r, key) for r in report.runs if getattr(r, key) is not None]
        ax.plot([i] * len(values), values, "o", color="black", ms=3, alpha=0.6)
    ax.set_xticks(xs, [_SLICE_LABELS[k] for k in keys])
    ax.set_ylim(0, 1)
    ax.set_ylabel("ROC-AUC")
    title = report.method if report.operator is None else f"{report.method} ({report.operator})"
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def sweep_figure(reports, grid_keys, path) -> None:
    """AUC versus the swept parameter (one line per total/intra/inter)."""
    fig, ax = plt.subplots(figsize=(5, 3.4))
    if len(grid_keys) == 1:
        key = grid_keys[0]
        xs = [r.params.get(key) for r in reports]
        for slice_key in ("auc_total", "auc_intra", "auc_inter"):
            ys = [r.mean()[slice_key] for r in reports]
            ax.plot(xs, ys, marker="o", label=_SLICE_LABELS[slice_key],
                    color=_SLICE_COLORS[slice_key])
        ax.set_xlabel(key)
    else:
        xs = np.arange(len(reports))
        for slice_key in ("auc_total", "auc_intra", "auc_inter"):
            ys = [r.mean()[slice_key] for r in reports]
            ax.plot(xs, ys, marker="o", label=_SLICE_LABELS[slice_key],
                    color=_SLICE_COLORS[slice_key])
        ax.set_xlabel("grid point")
    ax.set_ylabel("ROC-AUC")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def case_study_figure(rows, path) -> None:
    """2-D embedding scatter colored by community, labels on small graphs."""
    fig, ax = plt.subplots(figsize=(5, 5))
    comms = sorted({comm for _, _, _, comm in rows})
    cmap = plt.get_cmap("tab10")
    for comm in comms:
        pts = [(x, y) for _, x, y, cc in rows if cc == comm]
        xs, ys = zip(*pts)
        ax.scatter(xs, ys, s=40, color=cmap(comm % 10), label=f"community {comm}")
    if len(rows) <= 50:
        for node, x, y, _ in rows:
            ax.annotate(str(node), (x, y), fontsize=7,
                        xytext=(2, 2), textcoords="offset points")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
