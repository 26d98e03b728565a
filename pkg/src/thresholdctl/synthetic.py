"""Seeded synthetic instances with beta-distributed subtask scores."""

from __future__ import annotations

import numpy as np
from scipy import stats

from .core import Dataset, MultiLabelDataset, build_dataset, build_multilabel_dataset
from .expr import Expr, eval_boolean, parse_and_bind


def beta_mixture_instance(expression: str, n_subtasks: int = 2, n_samples: int = 200,
                          seed: int = 0, prevalence: float = 0.3,
                          positive=(5.0, 2.0), negative=(2.0, 5.0),
                          label_noise: float = 0.0) -> tuple[Dataset, Expr]:
    """Latent subtask truths drive both the scores and the decision label.

    Each subtask is present with probability ``prevalence``; its score is
    drawn from Beta(*positive) when present and Beta(*negative) otherwise.
    The label is the decision function applied to the latent truths, flipped
    with probability ``label_noise``.
    """
    rng = np.random.default_rng(seed)
    names = [f"s{i}" for i in range(n_subtasks)]
    expr = parse_and_bind(expression, names)
    truth = rng.random((n_samples, n_subtasks)) < prevalence
    scores = np.where(truth,
                      rng.beta(*positive, size=truth.shape),
                      rng.beta(*negative, size=truth.shape))
    labels = eval_boolean(expr, truth)
    flip = rng.random(n_samples) < label_noise
    labels = np.where(flip, 1 - labels, labels)
    return build_dataset(names, scores, labels), expr


def skewed_instance(expression: str, n_samples: int = 400, seed: int = 0,
                    shapes=((0.5, 8.0), (8.0, 0.5)), prevalence: float = 0.3,
                    label_noise: float = 0.0) -> tuple[Dataset, Expr]:
    """Informative scores pushed through beta quantile functions.

    Column ``i`` keeps the ranking of an informative latent score but its
    marginal follows Beta(*shapes[i]), so one column piles up near 0 and the
    other near 1.
    """
    rng = np.random.default_rng(seed)
    n = len(shapes)
    names = [f"s{i}" for i in range(n)]
    expr = parse_and_bind(expression, names)
    truth = rng.random((n_samples, n)) < prevalence
    latent = np.where(truth, rng.beta(5.0, 2.0, size=truth.shape), rng.beta(2.0, 5.0, size=truth.shape))
    scores = np.empty_like(latent)
    for i, (a, b) in enumerate(shapes):
        # empirical CDF of the latent column, mapped to the target marginal
        u = (stats.rankdata(latent[:, i]) - 0.5) / n_samples
        scores[:, i] = stats.beta.ppf(u, a, b)
    labels = eval_boolean(expr, truth)
    flip = rng.random(n_samples) < label_noise
    labels = np.where(flip, 1 - labels, labels)
    return build_dataset(names, np.clip(scores, 0.0, 1.0), labels), expr


def multilabel_instance(n_classes: int = 3, n_samples: int = 100, seed: int = 0,
                        prevalence: float = 0.3) -> MultiLabelDataset:
    """Independent classes whose score calibration differs per class.

    Class ``c`` scores positives from Beta(a_c, 2) and negatives from
    Beta(2, b_c) with a_c, b_c drawn from [2, 6], so no single shared
    threshold suits every class.
    """
    rng = np.random.default_rng(seed)
    labels = (rng.random((n_samples, n_classes)) < prevalence).astype(int)
    a = rng.uniform(2.0, 6.0, size=n_classes)
    b = rng.uniform(2.0, 6.0, size=n_classes)
    pos = rng.beta(a[None, :], 2.0, size=labels.shape)
    neg = rng.beta(2.0, b[None, :], size=labels.shape)
    scores = np.where(labels == 1, pos, neg)
    return build_multilabel_dataset([f"c{i}" for i in range(n_classes)], scores, labels)
