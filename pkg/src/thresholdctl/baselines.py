"""Comparison methods: one shared threshold, greedy coordinate search, SGLThresh."""

from __future__ import annotations

import numpy as np

from .core import FitConfig, FitResult
from .expr import Expr
from .optimizer import Problem, check_fittable, finish, fit_loop, prepare_scores
from .surrogate import sgl_sigma_partial, sgl_surrogate


def _names(data):
    return getattr(data, "subtask_names", None) or data.class_names


def _result(problem, names, method, thresholds, objective, target, iterations=0):
    report = problem.evaluate(thresholds)
    f1_mode = objective == "micro_f1"
    thresholds = np.array(thresholds, dtype=np.float64)
    return FitResult(
        method=method,
        subtask_names=tuple(names),
        thresholds_normalized=thresholds.copy(),
        thresholds_raw=thresholds,
        precision=report.precision,
        recall=report.recall,
        f1=report.f1,
        feasible=True if f1_mode else report.precision >= target,
        objective=objective,
        target_precision=None if f1_mode else target,
        iterations_run=iterations,
    )


def def_thresh(data, expr: Expr | None = None, tau: float = 0.5, target_precision: float = 0.9,
               objective: str = "recall_at_precision") -> FitResult:
    """Every subtask thresholded at the same raw value ``tau``; no search."""
    problem = Problem.of(data, expr)
    thresholds = np.full(problem.n_subtasks, float(tau))
    return _result(problem, _names(data), "default", thresholds, objective, target_precision)


def _rates(tp, fp, fn):
    tp = np.asarray(tp, dtype=np.float64)
    pp = tp + fp
    precision = np.divide(tp, pp, out=np.ones_like(tp), where=pp > 0)
    pos = tp + fn
    recall = np.divide(tp, pos, out=np.zeros_like(tp), where=pos > 0)
    denom = 2 * tp + fp + fn
    f1 = np.divide(2 * tp, denom, out=np.zeros_like(tp), where=denom > 0)
    return precision, recall, f1


def select_grid_index(precision, recall, f1, objective, target) -> tuple[int, bool]:
    """Index of the best candidate in a 1-D scan; candidates are in increasing threshold order.

    Recall at precision: highest recall among feasible candidates, else the
    highest precision (then recall). Ties go to the earliest candidate.
    """
    if objective == "micro_f1":
        return int(np.argmax(f1)), True
    feasible = precision >= target
    if feasible.any():
        masked = np.where(feasible, recall, -np.inf)
        return int(np.argmax(masked)), True
    best_p = precision.max()
    masked = np.where(precision == best_p, recall, -np.inf)
    return int(np.argmax(masked)), False


def greedy_thresh(data, expr: Expr | None = None, target_precision: float = 0.9,
                  grid_size: int = 101, max_sweeps: int = 10,
                  objective: str = "recall_at_precision") -> FitResult:
    """Coordinate ascent over an evenly spaced raw-threshold grid.

    Starts with every threshold at 0.5 and rescans one subtask at a time in
    column order, holding the others fixed. Stops after a sweep that changes
    nothing or after ``max_sweeps`` sweeps.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    problem = Problem.of(data, expr)
    grid = np.linspace(0.0, 1.0, grid_size)
    n = problem.n_subtasks
    thresholds = np.full(n, 0.5)
    bits = problem.scores > thresholds[None, :]

    best = None  # (recall, thresholds) of the best feasible configuration visited
    init = problem.evaluate(thresholds)
    if objective == "micro_f1" or init.precision >= target_precision:
        best = (init.f1 if objective == "micro_f1" else init.recall, thresholds.copy())

    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        changed = False
        for i in range(n):
            stack = np.broadcast_to(bits, (grid_size,) + bits.shape).copy()
            stack[:, :, i] = problem.scores[None, :, i] > grid[:, None]
            precision, recall, f1 = _rates(*problem.counts_batch(stack))
            k, feasible = select_grid_index(precision, recall, f1, objective, target_precision)
            if grid[k] != thresholds[i]:
                thresholds[i] = grid[k]
                bits[:, i] = stack[k, :, i]
                changed = True
            if feasible:
                score = f1[k] if objective == "micro_f1" else recall[k]
                if best is None or score > best[0]:
                    best = (score, thresholds.copy())
        if not changed:
            break
    chosen = best[1] if best is not None else thresholds
    return _result(problem, _names(data), "greedy", chosen, objective, target_precision, sweeps)


# ------------------------------------------------------------- SGLThresh

def sgl_default_config(objective: str = "recall_at_precision", **overrides) -> FitConfig:
    """SGLThresh defaults: lr 0.001 / 4000 steps from raw thresholds 0.3
    (recall at precision) or lr 0.01 / 100 steps from 0.5 (micro F1)."""
    if objective == "micro_f1":
        base = dict(learning_rate=0.01, iterations=100, tau_init=0.5)
    else:
        base = dict(learning_rate=0.001, iterations=4000, tau_init=0.3)
    base.update(normalize_scores=False, objective=objective)
    base.update(overrides)
    return FitConfig(**base)


class SigmoidSurrogate:
    """``d/dz step(z) ~ sigma * s(sigma z) * (1 - s(sigma z))`` with learnable sigma.

    Sigma is optimized through its logarithm, which keeps it positive.
    """

    name = "sglthresh"

    def __init__(self, config: FitConfig, sigma_init: float = 50.0):
        self.learn = config.learn_widths
        self.sigma_init = float(sigma_init)

    def initial_spread(self, n, config):
        return np.full(n, np.log(self.sigma_init))

    def spread_value(self, param):
        return np.exp(param)

    def gradients(self, upstream, z, param):
        sigma = np.exp(param)
        d_tau = -np.einsum("ji,ji->i", upstream, sgl_surrogate(z, sigma[None, :]))
        if not self.learn:
            return d_tau, np.zeros_like(param)
        d_sigma = np.einsum("ji,ji->i", upstream, sgl_sigma_partial(z, sigma[None, :]))
        return d_tau, d_sigma * sigma


def sgl_thresh_fit(data, expr: Expr | None = None, config: FitConfig | None = None,
                   sigma_init: float = 50.0) -> FitResult:
    """SGLThresh: hard forward pass, sigmoid surrogate backward pass.

    Shares the fit loop, penalty loss and best-iterate selection with
    TruSThresh; ``config.normalize_scores`` gives the normalized variant.
    """
    config = config or sgl_default_config()
    problem = Problem.of(data, expr)
    check_fittable(problem, config)
    qhat, maps = prepare_scores(problem, config)
    surrogate = SigmoidSurrogate(config, sigma_init)
    tau, param, trace, best_it = fit_loop(problem, qhat, surrogate, config, config.tau_init)
    return finish(problem, _names(data), "sglthresh", config, tau, maps, trace, best_it,
                  sigma=np.exp(param))
