"""Figure rendering for experiment reports.

Renders the recovery and cyclic-complexity summaries next to the CSV output.
The CSVs remain the data contract; these files are the human-readable view.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .experiments import ExperimentResult

__all__ = ["render_experiment_figures"]

FIG_SIZE = (4.2, 3.0)
DPI = 150

_STYLE = {
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
    "legend.fontsize": 8,
    "lines.markersize": 4,
}


def _series_label(k: int, samples: int | None) -> str:
    return f"K={k}" if samples is None else f"K={k}, s={samples}"


def render_experiment_figures(result: ExperimentResult, out_dir: str | Path) -> list[Path]:
    """Write recovery.png and tau.png (and baseline.png when baseline rows
    exist) into ``out_dir``; returns the created paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    with plt.rc_context(_STYLE):
        written.append(_recovery_figure(result, out_dir / "recovery.png"))
        written.append(_tau_figure(result, out_dir / "tau.png"))
        if result.baseline:
            written.append(_baseline_figure(result, out_dir / "baseline.png"))
    return written


def _recovery_figure(result: ExperimentResult, path: Path) -> Path:
    series = defaultdict(list)
    for row in result.points:
        series[(row.k, row.samples)].append(row)
    fig, axes = plt.subplots(1, 2, figsize=(FIG_SIZE[0] * 2, FIG_SIZE[1]), sharey=True)
    for (k, samples), rows in sorted(series.items(), key=lambda kv: (kv[0][0], kv[0][1] or 0)):
        rows = sorted(rows, key=lambda r: r.n)
        ns = [r.n for r in rows]
        label = _series_label(k, samples)
        axes[0].errorbar(
            ns, [r.precision_mean for r in rows],
            yerr=[r.precision_std for r in rows], marker="o", capsize=2, label=label,
        )
        axes[1].errorbar(
            ns, [r.recall_mean for r in rows],
            yerr=[r.recall_std for r in rows], marker="o", capsize=2, label=label,
        )
    for ax, title in zip(axes, ("precision", "recall")):
        ax.set_xlabel("nodes n")
        ax.set_ylabel(f"mean {title}")
        ax.set_ylim(-0.02, 1.05)
    axes[0].legend(loc="lower left")
    fig.suptitle(f"true-edge recovery ({result.config.backend} backend)")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def _tau_figure(result: ExperimentResult, path: Path) -> Path:
    series = defaultdict(list)
    for row in result.points:
        series[(row.k, row.samples)].append(row)
    fig, ax = plt.subplots(figsize=FIG_SIZE)
    for (k, samples), rows in sorted(series.items(), key=lambda kv: (kv[0][0], kv[0][1] or 0)):
        rows = sorted(rows, key=lambda r: r.n)
        ns = [r.n for r in rows]
        label = _series_label(k, samples)
        ax.plot(ns, [r.tau_true_mean for r in rows], marker="o", label=f"{label} (true)")
        ax.plot(
            ns,
            [r.tau_estimated_mean for r in rows],
            marker="x",
            linestyle="--",
            label=f"{label} (estimated)",
        )
    ax.set_xlabel("nodes n")
    ax.set_ylabel("mean cyclic complexity")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def _baseline_figure(result: ExperimentResult, path: Path) -> Path:
    per_point = defaultdict(lambda: defaultdict(list))
    for row in result.baseline:
        per_point[(row.n, row.k)]["skeleton"].append(row.skeleton_edges)
        per_point[(row.n, row.k)]["inseparable"].append(row.inseparable_pairs)
    fig, ax = plt.subplots(figsize=FIG_SIZE)
    points = sorted(per_point)
    xs = range(len(points))
    width = 0.38
    skeleton_means = [
        sum(per_point[p]["skeleton"]) / len(per_point[p]["skeleton"]) for p in points
    ]
    insep_means = [
        sum(per_point[p]["inseparable"]) / len(per_point[p]["inseparable"])
        for p in points
    ]
    ax.bar([x - width / 2 for x in xs], skeleton_means, width, label="true skeleton")
    ax.bar([x + width / 2 for x in xs], insep_means, width, label="inseparable pairs")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([f"n={n}\nK={k}" for n, k in points])
    ax.set_ylabel("mean edge/pair count")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path
