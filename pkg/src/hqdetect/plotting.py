"""Report figures written straight to PNG files (no display needed)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import numpy as np  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from .classical.metrics import roc_curve  # noqa: E402

# drop the version string so reruns produce identical files
_PNG_META = {"Software": None}


def _subplots(figsize):
    # Figure objects (not pyplot) so sweep cells can plot from worker threads
    fig = Figure(figsize=figsize)
    return fig, fig.subplots()


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_PNG_META)


def plot_confusion(counts, path, class_names=None, title="Confusion matrix"):
    c = np.asarray(getattr(counts, "counts", counts))
    k = c.shape[0]
    names = list(class_names) if class_names else [str(i) for i in range(k)]
    fig, ax = _subplots(figsize=(1.1 * k + 2.5, 1.0 * k + 2))
    im = ax.imshow(c, cmap="Blues")
    fig.colorbar(im, ax=ax, fraction=0.046)
    ax.set_xticks(range(k), names, rotation=45, ha="right")
    ax.set_yticks(range(k), names)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    ax.set_title(title)
    hi = c.max() if c.size else 0
    for i in range(k):
        for j in range(k):
            ax.text(j, i, str(int(c[i, j])), ha="center", va="center",
                    color="white" if hi and c[i, j] > hi / 2 else "black", fontsize=8)
    _save(fig, path)


def plot_roc(scores, labels, path, auc=None, title="ROC curve"):
    fpr, tpr = roc_curve(scores, labels)
    fig, ax = _subplots(figsize=(4.5, 4.5))
    ax.plot(fpr, tpr, drawstyle="steps-post", label=f"AUC = {auc:.4f}" if auc is not None else None)
    ax.plot([0, 1], [0, 1], ls="--", c="grey", lw=0.8)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.01)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_title(title)
    if auc is not None:
        ax.legend(loc="lower right")
    _save(fig, path)


def plot_metric_bars(rows, path, metric="accuracy", title=None):
    """Bar chart of one metric across sweep cells; ``rows`` are dicts with ``label`` and ``metric``."""
    labels = [r["label"] for r in rows]
    vals = [r[metric] for r in rows]
    fig, ax = _subplots(figsize=(max(4.0, 0.7 * len(rows) + 2), 4))
    ax.bar(range(len(vals)), vals, color="tab:blue")
    ax.set_xticks(range(len(vals)), labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel(metric)
    ax.set_title(title or metric)
    for i, v in enumerate(vals):
        ax.text(i, v + 0.01, f"{v:.3f}", ha="center", fontsize=7)
    _save(fig, path)


def plot_stage_counts(counts: dict, path, title="Pipeline stage counts"):
    fig, ax = _subplots(figsize=(5, 3.5))
    names = list(counts)
    ax.bar(names, [counts[n] for n in names], color="tab:green")
    ax.set_ylabel("records")
    ax.set_title(title)
    _save(fig, path)
