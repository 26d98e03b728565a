"""Exhaustive grid search over raw thresholds, for small instances.

The grid lives in raw score space so results do not depend on the
normalization code. Cells are visited in lexicographic order of their
threshold vectors and ties resolve to the first cell visited.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baselines import _rates, select_grid_index
from .errors import TooManySubtasks
from .expr import Expr
from .optimizer import Problem

MAX_SUBTASKS = 3
# upper bound on booleans materialized per chunk
_CHUNK_ELEMENTS = 1 << 24


@dataclass(frozen=True)
class OracleResult:
    thresholds: np.ndarray
    recall: float
    precision: float
    f1: float
    feasible: bool
    grid_size: int
    cells_evaluated: int


def grid_oracle(data, expr: Expr | None = None, grid_size: int = 101,
                target_precision: float = 0.9,
                objective: str = "recall_at_precision") -> OracleResult:
    """Best cell of the ``grid_size ** n`` grid over [0, 1]^n.

    Recall at precision picks the highest-recall cell meeting the target;
    when none does, the highest-precision cell (then highest recall) with
    ``feasible=False``. Micro F1 picks the highest-F1 cell.
    """
    problem = Problem.of(data, expr)
    n = problem.n_subtasks
    if n > MAX_SUBTASKS:
        raise TooManySubtasks(f"grid oracle supports at most {MAX_SUBTASKS} subtasks, got {n}")
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    grid = np.linspace(0.0, 1.0, grid_size)
    # column_bits[i][g, j] = score_ji > grid[g]
    column_bits = [problem.scores[None, :, i] > grid[:, None] for i in range(n)]
    n_cells = grid_size ** n
    n_rows = problem.scores.shape[0]
    chunk = max(1, _CHUNK_ELEMENTS // (n_rows * n))

    tp = np.empty(n_cells, dtype=np.int64)
    fp = np.empty(n_cells, dtype=np.int64)
    fn = np.empty(n_cells, dtype=np.int64)
    for start in range(0, n_cells, chunk):
        cells = np.arange(start, min(start + chunk, n_cells))
        index = np.unravel_index(cells, (grid_size,) * n)
        bits = np.stack([column_bits[i][index[i]] for i in range(n)], axis=-1)
        tp[cells], fp[cells], fn[cells] = problem.counts_batch(bits)

    precision, recall, f1 = _rates(tp, fp, fn)
    k, feasible = select_grid_index(precision, recall, f1, objective, target_precision)
    thresholds = grid[np.array(np.unravel_index(k, (grid_size,) * n))]
    return OracleResult(
        thresholds=thresholds,
        recall=float(recall[k]),
        precision=float(precision[k]),
        f1=float(f1[k]),
        feasible=bool(feasible),
        grid_size=grid_size,
        cells_evaluated=n_cells,
    )
