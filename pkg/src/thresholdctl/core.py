"""Shared domain types: datasets, fit configuration, fit results."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatch,
    DuplicateSubtaskName,
    EmptyDataset,
    InvalidLabel,
    InvalidSubtaskName,
    ScoreOutOfRange,
)

NAME_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

Objective = Literal["recall_at_precision", "micro_f1"]
OBJECTIVES = ("recall_at_precision", "micro_f1")
UPDATE_RULES = ("adam", "sgd")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _check_names(names: Sequence[str]) -> tuple[str, ...]:
    names = tuple(names)
    seen = set()
    for name in names:
        if not isinstance(name, str) or not NAME_PATTERN.match(name):
            raise InvalidSubtaskName(f"invalid subtask name {name!r}")
        if name in seen:
            raise DuplicateSubtaskName(f"duplicate subtask name {name!r}")
        seen.add(name)
    return names


def _check_scores(scores, n_rows: int | None = None) -> np.ndarray:
    try:
        scores = np.asarray(scores, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DimensionMismatch(f"scores must form a numeric matrix: {exc}") from None
    if scores.ndim != 2:
        raise DimensionMismatch(f"scores must be 2-D, got shape {scores.shape}")
    if scores.shape[0] == 0 or scores.shape[1] == 0:
        raise EmptyDataset("dataset needs at least one sample and one subtask")
    bad = ~((scores >= 0.0) & (scores <= 1.0))  # also catches NaN
    if bad.any():
        j, i = np.argwhere(bad)[0]
        raise ScoreOutOfRange(int(j), int(i), float(scores[j, i]))
    return scores


def _check_labels(labels, shape) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.shape != shape:
        raise DimensionMismatch(f"labels have shape {labels.shape}, expected {shape}")
    as_float = labels.astype(np.float64)
    if not np.all((as_float == 0.0) | (as_float == 1.0)):
        raise InvalidLabel("labels must be 0 or 1")
    return as_float.astype(np.int8)


@dataclass(frozen=True)
class Dataset:
    """Per-subtask scores (N x n) with one binary decision label per sample."""

    subtask_names: tuple[str, ...]
    scores: np.ndarray
    labels: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.scores.shape[0]

    @property
    def n_subtasks(self) -> int:
        return self.scores.shape[1]


@dataclass(frozen=True)
class MultiLabelDataset:
    """Multi-label scores and labels, both N x C, one column per class."""

    class_names: tuple[str, ...]
    scores: np.ndarray
    labels: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.scores.shape[0]

    @property
    def n_classes(self) -> int:
        return self.scores.shape[1]


def build_dataset(subtask_names: Sequence[str], scores, labels) -> Dataset:
    """Validate and freeze a recall-at-precision dataset.

    Column ``i`` of ``scores`` belongs to ``subtask_names[i]``.
    """
    names = _check_names(subtask_names)
    if len(names) == 0:
        raise EmptyDataset("no subtasks given")
    scores = _check_scores(scores)
    if scores.shape[1] != len(names):
        raise DimensionMismatch(
            f"{len(names)} subtask names but scores have {scores.shape[1]} columns"
        )
    labels = _check_labels(labels, (scores.shape[0],))
    return Dataset(names, _frozen(scores), _frozen(labels))


def build_multilabel_dataset(class_names: Sequence[str], scores, labels) -> MultiLabelDataset:
    names = _check_names(class_names)
    if len(names) == 0:
        raise EmptyDataset("no classes given")
    scores = _check_scores(scores)
    if scores.shape[1] != len(names):
        raise DimensionMismatch(
            f"{len(names)} class names but scores have {scores.shape[1]} columns"
        )
    labels = _check_labels(labels, scores.shape)
    return MultiLabelDataset(names, _frozen(scores), _frozen(labels))


def logit(p: float) -> float:
    return math.log(p) - math.log1p(-p)


@dataclass
class ThresholdState:
    """Learnable parameters: normalized thresholds and unconstrained width logits."""

    tau_hat: np.ndarray
    omega: np.ndarray

    @classmethod
    def initial(cls, n: int, tau_init: float, width_init: float) -> "ThresholdState":
        return cls(np.full(n, float(tau_init)), np.full(n, logit(width_init)))

    @property
    def widths(self) -> np.ndarray:
        # logistic(omega); the two-branch form avoids overflow for large |omega|
        from .surrogate import logistic

        return logistic(self.omega)

    def copy(self) -> "ThresholdState":
        return ThresholdState(self.tau_hat.copy(), self.omega.copy())


_DEFAULTS = {
    "recall_at_precision": {"width_init": 0.1, "iterations": 1000},
    "micro_f1": {"width_init": 0.04, "iterations": 400},
}


@dataclass
class FitConfig:
    """Hyperparameters for a fit.

    ``width_init`` and ``iterations`` default per objective (0.1 / 1000 for
    recall at precision, 0.04 / 400 for micro F1) when left as ``None``.
    """

    target_precision: float = 0.9
    alpha: float = 8.0
    learning_rate: float = 0.01
    iterations: int | None = None
    tau_init: float = 0.5
    width_init: float | None = None
    objective: str = "recall_at_precision"
    normalize_scores: bool = True
    learn_widths: bool = True
    update_rule: str = "adam"

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"unknown objective {self.objective!r}")
        defaults = _DEFAULTS[self.objective]
        if self.width_init is None:
            self.width_init = defaults["width_init"]
        if self.iterations is None:
            self.iterations = defaults["iterations"]
        if not 0.0 < self.target_precision <= 1.0:
            raise ConfigError("target_precision must lie in (0, 1]")
        if self.alpha < 0:
            raise ConfigError("alpha must be non-negative")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ConfigError("iterations must be a positive integer")
        self.iterations = int(self.iterations)
        if not 0.0 <= self.tau_init <= 1.0:
            raise ConfigError("tau_init must lie in [0, 1]")
        if not 0.0 < self.width_init < 1.0:
            raise ConfigError("width_init must lie in (0, 1)")
        if self.update_rule not in UPDATE_RULES:
            raise ConfigError(f"unknown update rule {self.update_rule!r}")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    loss: float
    precision: float
    recall: float
    f1: float
    tau_hat: tuple[float, ...]
    # widths for TruSThresh, sigma for SGLThresh, empty otherwise
    spread: tuple[float, ...] = ()


@dataclass
class FitResult:
    method: str
    subtask_names: tuple[str, ...]
    thresholds_normalized: np.ndarray
    thresholds_raw: np.ndarray
    precision: float
    recall: float
    f1: float
    feasible: bool
    objective: str = "recall_at_precision"
    target_precision: float | None = None
    widths: np.ndarray | None = None
    sigma: np.ndarray | None = None
    maps: list | None = None
    trace: list[TraceRecord] = field(default_factory=list)
    iterations_run: int = 0
    best_iteration: int | None = None

    def raw_threshold_map(self) -> dict[str, float]:
        return {k: float(v) for k, v in zip(self.subtask_names, self.thresholds_raw)}
