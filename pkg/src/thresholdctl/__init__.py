"""Per-subtask threshold optimization for boolean decision functions."""

from .core import (
    Dataset,
    FitConfig,
    FitResult,
    MultiLabelDataset,
    ThresholdState,
    build_dataset,
    build_multilabel_dataset,
)
from .expr import And, Leaf, Not, Or, eval_boolean, eval_numeric_with_partials, parse_and_bind
from .normalization import NormalizationMap, denormalize_threshold, rank_normalize
from .metrics import MetricReport, compute_metrics, metric_partials
from .surrogate import hsf, logistic, smoothed_hsf, surrogate_grads
from .optimizer import backward_pass, fit, fit_multilabel, forward_pass
from .baselines import def_thresh, greedy_thresh, sgl_thresh_fit
from .oracle import OracleResult, grid_oracle

__version__ = "0.1.0"

__all__ = [
    "And", "Dataset", "FitConfig", "FitResult", "Leaf", "MetricReport", "MultiLabelDataset",
    "NormalizationMap", "Not", "Or", "OracleResult", "ThresholdState", "backward_pass",
    "build_dataset", "build_multilabel_dataset", "compute_metrics", "def_thresh",
    "denormalize_threshold", "eval_boolean", "eval_numeric_with_partials", "fit",
    "fit_multilabel", "forward_pass", "greedy_thresh", "grid_oracle", "hsf", "logistic",
    "metric_partials", "parse_and_bind", "rank_normalize", "sgl_thresh_fit", "smoothed_hsf",
    "surrogate_grads",
]
