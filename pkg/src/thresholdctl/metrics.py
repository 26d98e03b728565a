"""Hard-prediction metrics and their gradients in the prediction vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch

EPS = 1e-8


@dataclass(frozen=True)
class MetricReport:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    # no positive labels: recall is reported as 0 but carries no information
    degenerate: bool = False


def _pair(labels, predictions):
    labels = np.asarray(labels).reshape(-1)
    predictions = np.asarray(predictions).reshape(-1)
    if labels.shape != predictions.shape:
        raise LengthMismatch(f"{labels.size} labels vs {predictions.size} predictions")
    return labels, predictions


def report_from_counts(tp: int, fp: int, fn: int, tn: int) -> MetricReport:
    precision = tp / (tp + fp) if tp + fp > 0 else 1.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    denom = 2 * tp + fp + fn
    f1 = 2 * tp / denom if denom > 0 else 0.0
    return MetricReport(tp, fp, fn, tn, precision, recall, f1, degenerate=(tp + fn == 0))


def compute_metrics(labels, predictions) -> MetricReport:
    """Confusion counts and precision/recall/F1 of binary predictions.

    Multi-label inputs (N x C) are flattened, which yields micro averages.
    With no predicted positives precision is 1.0; with no positive labels
    recall is 0.0 and ``degenerate`` is set.
    """
    y, p = _pair(labels, predictions)
    y = y.astype(bool)
    p = p.astype(bool)
    tp = int(np.count_nonzero(y & p))
    fp = int(np.count_nonzero(~y & p))
    fn = int(np.count_nonzero(y & ~p))
    tn = y.size - tp - fp - fn
    return report_from_counts(tp, fp, fn, tn)


def smooth_metrics(labels, soft_predictions) -> tuple[float, float, float]:
    """Precision, recall, F1 as smooth functions of real-valued predictions.

    Uses the same stabilized denominators as :func:`metric_partials`, so the
    two are exact derivatives of each other.
    """
    y, p = _pair(labels, soft_predictions)
    y = y.astype(np.float64)
    p = p.astype(np.float64)
    S, P, Q = float(y @ p), float(y.sum()), float(p.sum())
    return S / (Q + EPS), S / (P + EPS), 2 * S / (P + Q + EPS)


def metric_partials(labels, soft_predictions, which: str) -> np.ndarray:
    """Gradient of recall, precision or micro F1 with respect to each prediction."""
    y, p = _pair(labels, soft_predictions)
    y = y.astype(np.float64)
    p = p.astype(np.float64)
    S, P, Q = float(y @ p), float(y.sum()), float(p.sum())
    if which == "recall":
        return y / (P + EPS)
    if which == "precision":
        d = Q + EPS
        return (y * d - S) / (d * d)
    if which == "micro_f1":
        d = P + Q + EPS
        return (2.0 * y * d - 2.0 * S) / (d * d)
    raise ValueError(f"unknown metric {which!r}")
