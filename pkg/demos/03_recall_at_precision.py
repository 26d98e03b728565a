"""Recall at a target precision: the fitted thresholds against baselines and the grid oracle."""

from thresholdctl import FitConfig, def_thresh, fit, greedy_thresh, grid_oracle, sgl_thresh_fit
from thresholdctl.baselines import sgl_default_config
from thresholdctl.synthetic import beta_mixture_instance

data, policy = beta_mixture_instance("s0 AND s1", n_samples=200, seed=1)
print("policy:", policy, "| samples:", data.n_samples, "| positives:", int(data.labels.sum()))

for target in (0.9, 0.95, 0.975):
    rows = [
        ("default", def_thresh(data, policy, 0.5, target)),
        ("greedy", greedy_thresh(data, policy, target)),
        ("sglthresh", sgl_thresh_fit(data, policy, sgl_default_config(target_precision=target))),
        ("trusthresh", fit(data, policy, FitConfig(target_precision=target))),
    ]
    oracle = grid_oracle(data, policy, 101, target)
    print(f"\ntarget precision {target}")
    for name, r in rows:
        recall = f"{r.recall:.3f}" if r.feasible else "  -  "
        print(f"  {name:<11} recall {recall}  precision {r.precision:.3f}  thresholds {r.thresholds_raw.round(3)}")
    print(f"  {'oracle':<11} recall {oracle.recall:.3f}  precision {oracle.precision:.3f}  thresholds {oracle.thresholds}")

# the trace shows how recall and the widths evolve
r = fit(data, policy, FitConfig(target_precision=0.9))
for t in r.trace[::200]:
    print(f"iter {t.iteration:>4}  loss {t.loss:+.3f}  P {t.precision:.3f}  R {t.recall:.3f}  w {[round(w, 3) for w in t.spread]}")
print("best iterate:", r.best_iteration)
