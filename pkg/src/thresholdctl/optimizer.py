"""Threshold fitting with truncated surrogate gradients (TruSThresh).

The forward pass thresholds every (normalized) score with a hard step,
feeds the bits through the numeric decision function and scores the hard
predictions. The backward pass replaces the step's derivative with the
truncated-sine surrogate, so only samples within ``w_i`` of threshold
``i`` move it. Widths are learned through ``w = logistic(omega)``.

The constraint ``precision >= target`` is folded into the loss as the hinge
``alpha * max(target - precision, 0)``. Every iterate is scored with hard
metrics and the best feasible one is returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Dataset,
    FitConfig,
    FitResult,
    MultiLabelDataset,
    ThresholdState,
    TraceRecord,
    build_multilabel_dataset,
)
from .errors import ConfigError, DegenerateLabels, DimensionMismatch, NonFiniteGradient
from .expr import Expr, eval_boolean, eval_numeric_with_partials, max_index
from .metrics import compute_metrics, metric_partials, smooth_metrics
from .normalization import denormalize_thresholds, normalize_matrix
from .surrogate import _surrogate_grads, logistic, smoothed_hsf


# ------------------------------------------------------------------ problem

class Problem:
    """Scores, labels and the map from subtask bits to final predictions.

    With an expression there is one prediction per sample. Without one
    (multi-label mode) every class is thresholded on its own and the
    predictions are the flattened N x C bit grid.
    """

    def __init__(self, scores: np.ndarray, labels: np.ndarray, expr: Expr | None = None):
        self.scores = scores
        self.expr = expr
        self.labels = np.asarray(labels).reshape(-1)
        if expr is not None and max_index(expr) >= scores.shape[1]:
            raise DimensionMismatch("expression refers to a subtask beyond the dataset width")

    @classmethod
    def of(cls, data, expr=None) -> "Problem":
        if isinstance(data, MultiLabelDataset):
            return cls(data.scores, data.labels, None)
        return cls(data.scores, data.labels, expr)

    @property
    def n_subtasks(self) -> int:
        return self.scores.shape[1]

    def predict_bits(self, bits) -> np.ndarray:
        if self.expr is None:
            return np.asarray(bits).reshape(-1).astype(np.int8)
        return eval_boolean(self.expr, bits)

    def predict_batch(self, bits) -> np.ndarray:
        """Predictions for a stack of bit matrices shaped (..., N, n) -> (..., M)."""
        bits = np.asarray(bits, dtype=bool)
        if self.expr is None:
            return bits.reshape(bits.shape[:-2] + (-1,))
        return eval_boolean(self.expr, bits).astype(bool)

    def counts_batch(self, bits):
        """(tp, fp, fn) arrays for a stack of bit matrices."""
        pred = self.predict_batch(bits)
        y = self.labels.astype(bool)
        tp = np.count_nonzero(pred & y, axis=-1)
        fp = np.count_nonzero(pred & ~y, axis=-1)
        fn = int(np.count_nonzero(y)) - tp
        return tp, fp, fn

    def predict(self, thresholds) -> np.ndarray:
        """Hard predictions with raw thresholds applied to ``self.scores``."""
        return self.predict_bits(self.scores > np.asarray(thresholds)[None, :])

    def evaluate(self, thresholds):
        return compute_metrics(self.labels, self.predict(thresholds))

    def numeric(self, values):
        """Numeric predictions and the N x n matrix of their partials (None if identity)."""
        if self.expr is None:
            return np.asarray(values, dtype=np.float64).reshape(-1), None
        return eval_numeric_with_partials(self.expr, values)

    def upstream(self, loss_grad: np.ndarray, decision_partials) -> np.ndarray:
        """dLoss/dBit for every (sample, subtask)."""
        if decision_partials is None:
            return loss_grad.reshape(self.scores.shape)
        return loss_grad[:, None] * decision_partials


# ------------------------------------------------------------ loss pieces

def penalty_loss(recall: float, precision: float, target: float, alpha: float) -> float:
    return -recall + alpha * max(target - precision, 0.0)


def loss_gradient(labels, predictions, precision: float, config: FitConfig) -> np.ndarray:
    """dLoss/dPrediction assembled from the metric partials."""
    if config.objective == "micro_f1":
        return -metric_partials(labels, predictions, "micro_f1")
    grad = -metric_partials(labels, predictions, "recall")
    if precision < config.target_precision:
        grad = grad - config.alpha * metric_partials(labels, predictions, "precision")
    return grad


def _loss(precision, recall, f1, config):
    if config.objective == "micro_f1":
        return -f1
    return penalty_loss(recall, precision, config.target_precision, config.alpha)


# --------------------------------------------------------- forward/backward

@dataclass
class ForwardState:
    z: np.ndarray
    hard_bits: np.ndarray
    predictions: np.ndarray
    decision_partials: np.ndarray | None
    precision: float
    recall: float
    f1: float
    loss: float
    config: FitConfig


@dataclass
class GradientState:
    d_tau_hat: np.ndarray
    d_omega: np.ndarray


def _forward(problem: Problem, qhat: np.ndarray, tau_hat: np.ndarray, config: FitConfig) -> ForwardState:
    z = qhat - tau_hat[None, :]
    bits = (z > 0).astype(np.float64)
    predictions, partials = problem.numeric(bits)
    report = compute_metrics(problem.labels, predictions)
    loss = _loss(report.precision, report.recall, report.f1, config)
    return ForwardState(z, bits, predictions, partials, report.precision, report.recall,
                        report.f1, loss, config)


def forward_pass(normalized_dataset, expr: Expr | None, state: ThresholdState,
                 config: FitConfig) -> ForwardState:
    """Hard forward pass at ``state`` on already-normalized scores."""
    return _forward(Problem.of(normalized_dataset, expr), normalized_dataset.scores,
                    np.asarray(state.tau_hat, dtype=np.float64), config)


def _upstream(problem: Problem, fwd: ForwardState) -> np.ndarray:
    g = loss_gradient(problem.labels, fwd.predictions, fwd.precision, fwd.config)
    return problem.upstream(g, fwd.decision_partials)


def _sine_gradients(upstream, z, omega, learn_widths=True):
    w = logistic(omega)
    n = z.shape[1]
    d_tau = np.zeros(n)
    d_w = np.zeros(n)
    for i in range(n):
        # only samples inside the window contribute
        inside = np.flatnonzero(np.abs(z[:, i]) < w[i])
        gz, gw = _surrogate_grads(z[inside, i], w[i])
        u = upstream[inside, i]
        d_tau[i] = -(u @ gz)
        d_w[i] = u @ gw
    if not learn_widths:
        return d_tau, np.zeros_like(omega)
    return d_tau, d_w * w * (1.0 - w)


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NonFiniteGradient("gradient contains NaN or Inf")


def backward_pass(forward: ForwardState, normalized_dataset, state: ThresholdState) -> GradientState:
    """Surrogate gradients of the loss in ``tau_hat`` and ``omega``."""
    problem = Problem.of(normalized_dataset)
    U = _upstream(problem, forward)
    d_tau, d_omega = _sine_gradients(U, forward.z, np.asarray(state.omega, float),
                                     forward.config.learn_widths)
    _check_finite(d_tau, d_omega)
    return GradientState(d_tau, d_omega)


def smoothed_objective(normalized_dataset, expr: Expr | None, state: ThresholdState,
                       config: FitConfig) -> tuple[float, GradientState]:
    """Loss and exact gradient when every step is replaced by its sine relaxation.

    This is the smooth function whose derivative the surrogate backward pass
    mimics; finite differences of its loss check the gradient assembly.
    """
    problem = Problem.of(normalized_dataset, expr)
    tau_hat = np.asarray(state.tau_hat, float)
    omega = np.asarray(state.omega, float)
    w = logistic(omega)
    z = normalized_dataset.scores - tau_hat[None, :]
    values = smoothed_hsf(z, w[None, :])
    predictions, partials = problem.numeric(values)
    precision, recall, f1 = smooth_metrics(problem.labels, predictions)
    loss = _loss(precision, recall, f1, config)
    g = loss_gradient(problem.labels, predictions, precision, config)
    d_tau, d_omega = _sine_gradients(problem.upstream(g, partials), z, omega)
    return loss, GradientState(d_tau, d_omega)


# ---------------------------------------------------------------- updates

class Adam:
    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = self.v = None
        self.t = 0

    def step(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        if self.m is None:
            self.m = np.zeros_like(params)
            self.v = np.zeros_like(params)
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grads
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grads * grads
        m_hat = self.m / (1.0 - self.beta1 ** self.t)
        v_hat = self.v / (1.0 - self.beta2 ** self.t)
        return params - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class GradientDescent:
    def __init__(self, lr: float):
        self.lr = lr

    def step(self, params, grads):
        return params - self.lr * grads


def make_update_rule(config: FitConfig):
    if config.update_rule == "sgd":
        return GradientDescent(config.learning_rate)
    return Adam(config.learning_rate)


# ------------------------------------------------------------------ loop

class SineSurrogate:
    """Learnable-width truncated sine surrogate; spread parameter is omega."""

    name = "trusthresh"

    def __init__(self, config: FitConfig):
        self.learn = config.learn_widths

    def initial_spread(self, n, config):
        return ThresholdState.initial(n, config.tau_init, config.width_init).omega

    def spread_value(self, param):
        return logistic(param)

    def gradients(self, upstream, z, param):
        return _sine_gradients(upstream, z, param, self.learn)


def fit_loop(problem: Problem, qhat: np.ndarray, surrogate, config: FitConfig, tau_init: float):
    """Run the optimization and pick the reported iterate.

    Returns ``(tau_hat, spread_param, trace, best_iteration)``. Iterate 0 is
    the initialization and iterate ``config.iterations`` the state after the
    last update, so the trace has ``iterations + 1`` entries.
    """
    n = problem.n_subtasks
    tau = np.full(n, float(tau_init))
    param = surrogate.initial_spread(n, config)
    rule = make_update_rule(config)
    trace = []
    best = None  # (score, iteration, tau, param)
    f1_mode = config.objective == "micro_f1"
    for it in range(config.iterations + 1):
        fwd = _forward(problem, qhat, tau, config)
        trace.append(TraceRecord(it, float(fwd.loss), fwd.precision, fwd.recall, fwd.f1,
                                 tuple(tau.tolist()),
                                 tuple(np.atleast_1d(surrogate.spread_value(param)).tolist())))
        if f1_mode:
            score = fwd.f1
        else:
            score = fwd.recall if fwd.precision >= config.target_precision else None
        if score is not None and (best is None or score > best[0]):
            best = (score, it, tau.copy(), param.copy())
        if it == config.iterations:
            break
        d_tau, d_param = surrogate.gradients(_upstream(problem, fwd), fwd.z, param)
        _check_finite(d_tau, d_param)
        updated = rule.step(np.concatenate([tau, param]), np.concatenate([d_tau, d_param]))
        tau = np.clip(updated[:n], 0.0, 1.0)
        if surrogate.learn:
            param = updated[n:]
    if best is None:
        return tau, param, trace, config.iterations
    return best[2], best[3], trace, best[1]


def prepare_scores(problem: Problem, config: FitConfig):
    if config.normalize_scores:
        qhat, maps = normalize_matrix(problem.scores)
    else:
        qhat, maps = problem.scores, None
    # column-major keeps each subtask contiguous for the per-leaf arithmetic
    return np.asfortranarray(qhat), maps


def finish(problem: Problem, names, method, config, tau_hat, maps, trace, best_it,
           widths=None, sigma=None) -> FitResult:
    """Map thresholds to raw space and re-score them on the raw scores."""
    raw = denormalize_thresholds(tau_hat, maps) if maps is not None else np.array(tau_hat, float)
    report = problem.evaluate(raw)
    f1_mode = config.objective == "micro_f1"
    feasible = True if f1_mode else report.precision >= config.target_precision
    return FitResult(
        method=method,
        subtask_names=tuple(names),
        thresholds_normalized=np.array(tau_hat, float),
        thresholds_raw=raw,
        precision=report.precision,
        recall=report.recall,
        f1=report.f1,
        feasible=bool(feasible),
        objective=config.objective,
        target_precision=None if f1_mode else config.target_precision,
        widths=widths,
        sigma=sigma,
        maps=maps,
        trace=trace,
        iterations_run=config.iterations,
        best_iteration=best_it,
    )


def check_fittable(problem: Problem, config: FitConfig):
    if config.objective == "recall_at_precision":
        positives = int(np.count_nonzero(problem.labels))
        if positives == 0:
            raise DegenerateLabels("recall at precision needs at least one positive label")
        if positives == problem.labels.size:
            raise DegenerateLabels("recall at precision needs at least one negative label")


def fit(dataset: Dataset, expr: Expr, config: FitConfig | None = None) -> FitResult:
    """Fit one threshold per subtask for the decision function ``expr``.

    Returns the iterate with the highest recall among those meeting the
    target precision (or the highest F1 in ``micro_f1`` mode). When no
    iterate is feasible the final one is returned with ``feasible=False``.
    """
    config = config or FitConfig()
    problem = Problem.of(dataset, expr)
    check_fittable(problem, config)
    return _fit_problem(problem, dataset.subtask_names, config)


def _fit_problem(problem, names, config):
    qhat, maps = prepare_scores(problem, config)
    surrogate = SineSurrogate(config)
    tau, omega, trace, best_it = fit_loop(problem, qhat, surrogate, config, config.tau_init)
    return finish(problem, names, "trusthresh", config, tau, maps, trace, best_it,
                  widths=logistic(omega))


def fit_multilabel(scores, labels=None, config: FitConfig | None = None,
                   class_names=None) -> FitResult:
    """Per-class thresholds maximizing micro-averaged F1.

    ``scores`` is either a :class:`MultiLabelDataset` or an N x C matrix
    (with ``labels`` the matching binary matrix).
    """
    if isinstance(scores, MultiLabelDataset):
        data = scores
    else:
        scores = np.asarray(scores, dtype=np.float64)
        if class_names is None:
            class_names = [f"c{i}" for i in range(scores.shape[1] if scores.ndim == 2 else 0)]
        data = build_multilabel_dataset(class_names, scores, labels)
    config = config or FitConfig(objective="micro_f1")
    if config.objective != "micro_f1":
        raise ConfigError("fit_multilabel requires objective='micro_f1'")
    return _fit_problem(Problem.of(data), data.class_names, config)
