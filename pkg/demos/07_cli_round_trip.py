"""The command line on a CSV file: fit, re-evaluate from the report, compare methods."""

import csv
import json
import tempfile
from pathlib import Path

from thresholdctl.cli import main
from thresholdctl.synthetic import beta_mixture_instance

work = Path(tempfile.mkdtemp())
data, _ = beta_mixture_instance("s0 OR s1", seed=0)
with open(work / "scores.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow([*data.subtask_names, "label"])
    for row, y in zip(data.scores.tolist(), data.labels.tolist()):
        w.writerow([*map(repr, row), y])

common = ["--input", str(work / "scores.csv"), "--expression", "s0 OR s1"]
code = main(["fit", *common, "--target-precision", "0.9", "--output", str(work / "report.json")])
report = json.loads((work / "report.json").read_text())
print("fit exit code", code, "| thresholds", report["thresholds_raw"], "| metrics", report["metrics"])

main(["eval", "--input", str(work / "scores.csv"), "--report", str(work / "report.json"),
      "--output", str(work / "eval.json")])
print("eval metrics", json.loads((work / "eval.json").read_text())["metrics"])

main(["compare", *common, "--methods", "default,greedy,trusthresh", "--targets", "0.9,0.95,0.975",
      "--output", str(work / "compare.json")])
for row in json.loads((work / "compare.json").read_text())["rows"]:
    print(f"{row['method']:<11} @ {row['target_precision']}: recall {row['recall']:.3f} feasible {row['feasible']}")

code = main(["fit", *common, "--target-precision", "0.9", "--method", "bespoke"])
print("unknown method exit code", code)
