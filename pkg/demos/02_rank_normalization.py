"""Rank normalization and mapping a normalized threshold back to raw scores."""

import numpy as np

from thresholdctl import build_dataset, denormalize_threshold, rank_normalize

raw = np.array([[0.9, 0.02], [0.1, 0.03], [0.5, 0.03], [0.5, 0.9]])
data = build_dataset(["a", "b"], raw, [1, 0, 1, 1])
normed, maps = rank_normalize(data)
print("raw scores:\n", raw)
print("normalized (midrank / N):\n", normed.scores)  # ties share a rank

m = maps[0]
print("knots for a:", m.raw, "->", m.normalized)

# any normalized threshold maps to a raw one that splits the column the same way
for tau_hat in (0.0, 0.3, 0.5, 0.625, 0.9, 1.0):
    tau = denormalize_threshold(tau_hat, m)
    same = np.array_equal(raw[:, 0] > tau, normed.scores[:, 0] > tau_hat)
    print(f"tau_hat={tau_hat:<6} raw tau={tau:.6f} same split: {same}")
