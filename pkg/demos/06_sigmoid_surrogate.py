"""The sigmoid surrogate's sigma gradient is orders of magnitude below the threshold gradient.

Over thousands of small steps sigma still drifts, much further under Adam,
which rescales each parameter's step, than under plain gradient descent.
"""

import numpy as np

from thresholdctl import FitConfig, fit, sgl_thresh_fit
from thresholdctl.baselines import SigmoidSurrogate, sgl_default_config
from thresholdctl.optimizer import Problem, _forward, _upstream
from thresholdctl.surrogate import sgl_sigma_partial
from thresholdctl.synthetic import beta_mixture_instance

z = np.linspace(-0.5, 0.5, 100_001)
partial = np.abs(sgl_sigma_partial(z, 50.0))
print(f"max |d s(sigma z) / d sigma| at sigma=50: {partial.max():.6f} at z={z[partial.argmax()]:.4f}")

data, policy = beta_mixture_instance("s0 OR s1", seed=0)
config = sgl_default_config(target_precision=0.9)
problem = Problem.of(data, policy)
surrogate = SigmoidSurrogate(config)
fwd = _forward(problem, data.scores, [0.3, 0.3] + np.zeros(2), config)
d_tau, d_log_sigma = surrogate.gradients(_upstream(problem, fwd), fwd.z, surrogate.initial_spread(2, config))
print("gradient at start: d tau", d_tau.round(4), " d sigma", (d_log_sigma / 50.0).round(6))

sgd = sgl_thresh_fit(data, policy, sgl_default_config(target_precision=0.9, update_rule="sgd", learning_rate=0.01))
print("sigma after plain gradient descent:", tuple(round(s, 4) for s in sgd.trace[-1].spread))

sgl = sgl_thresh_fit(data, policy, sgl_default_config(target_precision=0.9))
tru = fit(data, policy, FitConfig(target_precision=0.9))
print("sigma start -> end under Adam:", sgl.trace[0].spread, "->", tuple(round(s, 2) for s in sgl.trace[-1].spread))
print("width start -> end:", tru.trace[0].spread, "->", tuple(round(w, 4) for w in tru.trace[-1].spread))


def first_reaching(trace, recall):
    return next((t.iteration for t in trace if t.precision >= 0.9 and t.recall >= recall), None)


goal = 0.98 * tru.recall
print(f"iterations to feasible recall >= {goal:.3f}: trusthresh {first_reaching(tru.trace, goal)}, "
      f"sglthresh {first_reaching(sgl.trace, goal)}")
