"""Confusion-matrix metrics and rank-based ROC AUC."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ..errors import DegenerateLabels, EmptyMatrix, LabelOutOfRange, LengthMismatch


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Rows are true classes, columns predicted classes."""

    counts: np.ndarray

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def tolist(self) -> list:
        return self.counts.tolist()


def confusion_matrix(y_true, y_pred, n_classes: int) -> ConfusionMatrix:
    t = np.asarray(y_true, dtype=int).ravel()
    p = np.asarray(y_pred, dtype=int).ravel()
    if t.size != p.size:
        raise LengthMismatch(f"{t.size} true labels vs {p.size} predictions")
    for arr in (t, p):
        if arr.size and (arr.min() < 0 or arr.max() >= n_classes):
            raise LabelOutOfRange(f"labels must lie in [0, {n_classes})")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (t, p), 1)
    return ConfusionMatrix(counts)


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: tuple
    recall: tuple
    f1: tuple
    support: tuple
    macro_precision: float
    macro_recall: float
    macro_f1: float
    weighted_f1: float
    # classes whose precision or recall hit a zero denominator and were set to 0
    zero_division: tuple = ()

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": list(self.precision),
            "recall": list(self.recall),
            "f1": list(self.f1),
            "support": list(self.support),
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "weighted_f1": self.weighted_f1,
            "zero_division": list(self.zero_division),
        }


def metrics_from_cm(cm) -> MetricsReport:
    """One-vs-rest precision/recall/F1 per class plus macro and support-weighted F1."""
    c = np.asarray(getattr(cm, "counts", cm), dtype=np.int64)
    total = int(c.sum())
    if total <= 0:
        raise EmptyMatrix("confusion matrix has no samples")
    tp = np.diag(c).astype(float)
    pred = c.sum(axis=0).astype(float)
    support = c.sum(axis=1)
    flagged = []
    prec, rec, f1 = [], [], []
    for k in range(c.shape[0]):
        p = tp[k] / pred[k] if pred[k] > 0 else 0.0
        r = tp[k] / support[k] if support[k] > 0 else 0.0
        if pred[k] == 0 or support[k] == 0:
            flagged.append(k)
        prec.append(p)
        rec.append(r)
        f1.append(2 * p * r / (p + r) if p + r > 0 else 0.0)
    weighted = float(np.dot(support, f1) / support.sum())
    return MetricsReport(
        accuracy=float(tp.sum() / total),
        precision=tuple(prec),
        recall=tuple(rec),
        f1=tuple(f1),
        support=tuple(int(s) for s in support),
        macro_precision=float(np.mean(prec)),
        macro_recall=float(np.mean(rec)),
        macro_f1=float(np.mean(f1)),
        weighted_f1=weighted,
        zero_division=tuple(flagged),
    )


def roc_auc(scores, labels) -> float:
    """Normalized Mann-Whitney U statistic; tied scores count one half."""
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).ravel().astype(int)
    if s.size != y.size:
        raise LengthMismatch("scores and labels differ in length")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0 or n_pos + n_neg != y.size:
        raise DegenerateLabels("AUC needs binary labels with both classes present")
    ranks = rankdata(s)
    u = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))


def roc_curve(scores, labels):
    """False/true positive rates at every distinct threshold (for plotting)."""
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).ravel().astype(int)
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    distinct = np.r_[np.nonzero(np.diff(s))[0], s.size - 1]
    tps = np.cumsum(y)[distinct]
    fps = (distinct + 1) - tps
    tpr = np.r_[0.0, tps / max(y.sum(), 1)]
    fpr = np.r_[0.0, fps / max((1 - y).sum(), 1)]
    return fpr, tpr
