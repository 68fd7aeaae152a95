"""Scoring significance calls and p-value rankings against the simulated truth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .randgen import ParameterError

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


@dataclass(frozen=True)
class ConfusionSummary:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def type1(self) -> float:
        return _ratio(self.fp, self.fp + self.tn)

    @property
    def fdr(self) -> float:
        return _ratio(self.fp, self.tp + self.fp)

    @property
    def power(self) -> float:
        return _ratio(self.tp, self.tp + self.fn)


@dataclass
class CurveSeries:
    kind: str  # "ROC" or "PR"
    x: np.ndarray
    y: np.ndarray
    auc: float

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))


def confusion(significant, truth) -> ConfusionSummary:
    sig = np.asarray(significant, dtype=bool)
    de = np.asarray(truth, dtype=bool)
    if sig.shape != de.shape:
        raise ParameterError(f"length mismatch: {sig.shape} calls vs {de.shape} truth labels")
    return ConfusionSummary(
        tp=int(np.count_nonzero(sig & de)),
        fp=int(np.count_nonzero(sig & ~de)),
        tn=int(np.count_nonzero(~sig & ~de)),
        fn=int(np.count_nonzero(~sig & de)),
    )


def error_rates(cm: ConfusionSummary) -> tuple[float, float, float]:
    """(type I error, FDR, power); any 0/0 ratio is reported as 0."""
    return cm.type1, cm.fdr, cm.power


def _sweep(pvals, truth) -> tuple[np.ndarray, np.ndarray, int, int]:
    """Cumulative TP and FP counts calling ``p <= t`` at each unique p, ascending."""
    p = np.asarray(pvals, dtype=float)
    de = np.asarray(truth, dtype=bool)
    if p.shape != de.shape:
        raise ParameterError("pvals and truth differ in length")
    n_pos = int(de.sum())
    n_neg = de.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ParameterError("truth must contain both DE and null genes")
    order = np.argsort(p, kind="stable")
    p_sorted = p[order]
    de_sorted = de[order]
    tp = np.cumsum(de_sorted)
    fp = np.cumsum(~de_sorted)
    # last index of each run of equal p values: tied genes enter together
    last = np.flatnonzero(np.append(p_sorted[1:] != p_sorted[:-1], True))
    return tp[last], fp[last], n_pos, n_neg


def roc_curve(pvals, truth) -> CurveSeries:
    """(FPR, TPR) points from (0, 0) to (1, 1); smaller p ranks higher.

    For a specificity axis use ``1 - x``.
    """
    tp, fp, n_pos, n_neg = _sweep(pvals, truth)
    fpr = np.concatenate([[0.0], fp / n_neg])
    tpr = np.concatenate([[0.0], tp / n_pos])
    return CurveSeries("ROC", fpr, tpr, float(_trapezoid(tpr, fpr)))


def pr_curve(pvals, truth) -> CurveSeries:
    """(recall, precision) at each unique threshold.

    The area is a trapezoid sum that also includes a (recall 0, precision 1)
    anchor; the anchor is not one of the returned points.
    """
    tp, fp, n_pos, _ = _sweep(pvals, truth)
    recall = tp / n_pos
    precision = tp / (tp + fp)
    auc = float(_trapezoid(np.concatenate([[1.0], precision]), np.concatenate([[0.0], recall])))
    return CurveSeries("PR", recall, precision, auc)
