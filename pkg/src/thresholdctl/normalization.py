"""Rank normalization of score columns and the inverse map for thresholds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, build_dataset
from .errors import EmptyMap

# offset used below the smallest knot so that every sample passes
BELOW_MIN_OFFSET = 2.0 ** -20


@dataclass(frozen=True)
class NormalizationMap:
    """Monotone correspondence between raw and normalized scores of one column.

    ``raw`` holds the distinct raw scores in increasing order and
    ``normalized`` their midrank / N values (also strictly increasing).
    """

    raw: np.ndarray
    normalized: np.ndarray
    n_samples: int

    def to_dict(self) -> dict:
        return {
            "raw": [float(v) for v in self.raw],
            "normalized": [float(v) for v in self.normalized],
            "n_samples": int(self.n_samples),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationMap":
        return cls(np.asarray(d["raw"], float), np.asarray(d["normalized"], float), int(d["n_samples"]))


def midranks(column: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """1-based ranks with ties sharing the mean of their ordinal ranks.

    Returns ``(ranks, distinct_values, distinct_ranks)``.
    """
    values, inverse, counts = np.unique(column, return_inverse=True, return_counts=True)
    upper = np.cumsum(counts)  # ordinal rank of the last member of each tie group
    group_rank = upper - (counts - 1) / 2.0
    return group_rank[inverse.reshape(-1)], values, group_rank


def normalize_column(column) -> tuple[np.ndarray, NormalizationMap]:
    column = np.asarray(column, dtype=np.float64)
    n = column.shape[0]
    ranks, values, group_rank = midranks(column)
    return ranks / n, NormalizationMap(values, group_rank / n, n)


def rank_normalize(dataset: Dataset) -> tuple[Dataset, list[NormalizationMap]]:
    """Replace every score by its within-column rank divided by N.

    Labels and column order are untouched. Output scores lie in (0, 1].
    """
    scores, maps = normalize_matrix(dataset.scores)
    return build_dataset(dataset.subtask_names, scores, dataset.labels), maps


def normalize_matrix(scores) -> tuple[np.ndarray, list[NormalizationMap]]:
    scores = np.asarray(scores, dtype=np.float64)
    out = np.empty_like(scores)
    maps = []
    for i in range(scores.shape[1]):
        out[:, i], m = normalize_column(scores[:, i])
        maps.append(m)
    return out, maps


def denormalize_threshold(tau_hat: float, nmap: NormalizationMap) -> float:
    """Raw threshold that classifies the fitted column exactly like ``tau_hat``.

    For every sample, ``q > result`` holds iff ``q_hat > tau_hat``. Between
    knots the value is linearly interpolated on (normalized, raw) pairs.
    """
    raw, norm = nmap.raw, nmap.normalized
    if raw.size == 0:
        raise EmptyMap("normalization map has no knots")
    tau_hat = float(tau_hat)
    if tau_hat < norm[0]:
        return float(raw[0] - BELOW_MIN_OFFSET)
    if tau_hat >= norm[-1]:
        return float(raw[-1])
    k = int(np.searchsorted(norm, tau_hat, side="right")) - 1  # norm[k] <= tau_hat < norm[k+1]
    frac = (tau_hat - norm[k]) / (norm[k + 1] - norm[k])
    tau = raw[k] + frac * (raw[k + 1] - raw[k])
    if tau >= raw[k + 1]:
        # rounding pushed the interpolant onto the next knot
        tau = np.nextafter(raw[k + 1], -np.inf)
    return float(max(tau, raw[k]))


def denormalize_thresholds(tau_hat, maps) -> np.ndarray:
    return np.array([denormalize_threshold(t, m) for t, m in zip(tau_hat, maps)])
