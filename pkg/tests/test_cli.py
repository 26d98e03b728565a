import json
import subprocess
import sys

import numpy as np
import pytest

from thresholdctl.cli import main
from thresholdctl.datafiles import load_dataset, report_schema
from thresholdctl.optimizer import Problem
from thresholdctl.synthetic import beta_mixture_instance, multilabel_instance


@pytest.fixture
def binary_csv(tmp_path):
    d, _ = beta_mixture_instance("s0 OR s1", seed=0)
    lines = ["s0,s1,label"] + [f"{a!r},{b!r},{int(y)}" for (a, b), y in zip(d.scores.tolist(), d.labels)]
    path = tmp_path / "d.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def multilabel_csv(tmp_path):
    d = multilabel_instance(seed=0)
    header = list(d.class_names) + [f"label_{c}" for c in d.class_names]
    rows = [",".join([*(repr(float(v)) for v in s), *(str(int(v)) for v in y)])
            for s, y in zip(d.scores, d.labels)]
    path = tmp_path / "m.csv"
    path.write_text("\n".join([",".join(header)] + rows) + "\n")
    return path


@pytest.fixture
def tautology_csv(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("a,label\n0.3,1\n0.6,0\n0.8,1\n0.2,0\n")
    return path


def run(*args):
    return main([str(a) for a in args])


def read(path):
    return json.loads(path.read_text())


class TestFit:
    def test_feasible_run(self, binary_csv, tmp_path):
        out = tmp_path / "r.json"
        code = run("fit", "--input", binary_csv, "--expression", "s0 OR s1",
                   "--target-precision", 0.9, "--output", out, "--trace")
        assert code == 0
        report = read(out)
        pytest.importorskip("jsonschema").validate(report, report_schema())
        assert report["feasible"] and report["method"] == "trusthresh"
        assert set(report["thresholds_raw"]) == {"s0", "s1"}
        assert report["sigma"] is None and report["widths"] is not None

    def test_infeasible_exit_code(self, tautology_csv, tmp_path):
        out = tmp_path / "r.json"
        code = run("fit", "--input", tautology_csv, "--expression", "a OR NOT a",
                   "--target-precision", 0.999, "--output", out, "--iterations", 50)
        assert code == 3
        assert read(out)["feasible"] is False

    def test_unknown_method(self, binary_csv, capsys):
        code = run("fit", "--input", binary_csv, "--expression", "s0 OR s1",
                   "--target-precision", 0.9, "--method", "bespoke")
        assert code == 2
        assert "bespoke" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert run("fit", "--input", tmp_path / "none.csv", "--expression", "a",
                   "--target-precision", 0.9) == 1

    def test_bad_expression_is_input_error(self, binary_csv):
        assert run("fit", "--input", binary_csv, "--expression", "s0 OR nope",
                   "--target-precision", 0.9) == 1

    def test_expression_from_file(self, binary_csv, tmp_path):
        expr = tmp_path / "policy.txt"
        expr.write_text("s0 OR s1\n")
        out = tmp_path / "r.json"
        assert run("fit", "--input", binary_csv, "--expression", expr,
                   "--target-precision", 0.9, "--output", out, "--iterations", 50) == 0

    def test_preset(self, binary_csv, tmp_path):
        out = tmp_path / "r.json"
        assert run("fit", "--input", binary_csv, "--preset", "or-chain",
                   "--target-precision", 0.9, "--output", out, "--iterations", 50) == 0

    @pytest.mark.parametrize("args", [
        ["--target-precision", "0.9"],                                   # no expression
        ["--expression", "s0 OR s1"],                                    # no target
        ["--expression", "s0 OR s1", "--preset", "or-chain", "--target-precision", "0.9"],
        ["--expression", "s0 OR s1", "--target-precision", "0.9", "--alpha", "-1"],
    ])
    def test_config_errors(self, binary_csv, args):
        assert run("fit", "--input", binary_csv, *args) == 2

    def test_micro_f1_rejects_expression(self, multilabel_csv):
        assert run("fit", "--input", multilabel_csv, "--objective", "micro_f1",
                   "--expression", "c0") == 2

    def test_micro_f1_rejects_target(self, multilabel_csv):
        assert run("fit", "--input", multilabel_csv, "--objective", "micro_f1",
                   "--target-precision", 0.9) == 2

    def test_multilabel_needs_micro_f1(self, multilabel_csv):
        assert run("fit", "--input", multilabel_csv, "--expression", "c0",
                   "--target-precision", 0.9) == 2

    def test_micro_f1(self, multilabel_csv, tmp_path):
        out = tmp_path / "r.json"
        assert run("fit", "--input", multilabel_csv, "--objective", "micro_f1", "--output", out) == 0
        report = read(out)
        assert report["objective"] == "micro_f1" and report["target_precision"] is None

    def test_sglthresh_report(self, binary_csv, tmp_path):
        out = tmp_path / "r.json"
        assert run("fit", "--input", binary_csv, "--expression", "s0 OR s1", "--target-precision", 0.9,
                   "--method", "sglthresh", "--iterations", 1000, "--output", out) == 0
        report = read(out)
        assert report["widths"] is None and set(report["sigma"]) == {"s0", "s1"}
        assert report["normalization"] is None

    def test_config_file_overridden_by_flags(self, binary_csv, tmp_path):
        cfg = tmp_path / "run.yaml"
        cfg.write_text(f"input_path: {binary_csv}\nexpression: s0 OR s1\n"
                       "target_precision: 0.9\niterations: 20\nalpha: 4\n")
        out = tmp_path / "r.json"
        assert run("fit", "--config", cfg, "--iterations", 30, "--output", out) == 0
        report = read(out)
        assert report["iterations_run"] == 30
        assert report["config"]["alpha"] == 4

    def test_config_file_unknown_key(self, binary_csv, tmp_path):
        cfg = tmp_path / "run.yaml"
        cfg.write_text("learning_rat: 0.1\n")
        assert run("fit", "--config", cfg, "--input", binary_csv) == 2


class TestEval:
    def test_round_trip(self, binary_csv, tmp_path):
        report_path = tmp_path / "r.json"
        assert run("fit", "--input", binary_csv, "--expression", "s0 OR s1",
                   "--target-precision", 0.9, "--output", report_path) == 0
        out = tmp_path / "e.json"
        assert run("eval", "--input", binary_csv, "--report", report_path, "--output", out) == 0
        report, evaluated = read(report_path), read(out)
        assert evaluated["metrics"] == report["metrics"]
        assert evaluated["feasible"] is True

    def test_explicit_thresholds(self, binary_csv, tmp_path):
        out = tmp_path / "e.json"
        assert run("eval", "--input", binary_csv, "--expression", "s0 OR s1",
                   "--thresholds", "s0=0.5,s1=0.5", "--output", out) == 0
        d = load_dataset(binary_csv)
        from thresholdctl import parse_and_bind

        m = Problem.of(d, parse_and_bind("s0 OR s1", d.subtask_names)).evaluate(np.array([0.5, 0.5]))
        assert read(out)["metrics"]["recall"] == m.recall

    def test_missing_threshold(self, binary_csv):
        assert run("eval", "--input", binary_csv, "--expression", "s0 OR s1",
                   "--thresholds", "s0=0.5") == 2


class TestCompare:
    def test_cross_product(self, binary_csv, tmp_path):
        out = tmp_path / "c.json"
        code = run("compare", "--input", binary_csv, "--expression", "s0 OR s1",
                   "--methods", "default,greedy,sglthresh,trusthresh",
                   "--targets", "0.9,0.95,0.975", "--iterations", 200, "--output", out, "--trace")
        assert code == 0
        report = read(out)
        rows = report["rows"]
        assert len(rows) == 12
        assert [(r["method"], r["target_precision"]) for r in rows[:4]] == [
            ("default", 0.9), ("greedy", 0.9), ("sglthresh", 0.9), ("trusthresh", 0.9)]
        assert set(report["traces"]) == {"sglthresh@0.9", "sglthresh@0.95", "sglthresh@0.975",
                                         "trusthresh@0.9", "trusthresh@0.95", "trusthresh@0.975"}
        # every row re-scores from its own thresholds
        d = load_dataset(binary_csv)
        from thresholdctl import parse_and_bind

        problem = Problem.of(d, parse_and_bind("s0 OR s1", d.subtask_names))
        for r in rows:
            m = problem.evaluate(np.array([r["thresholds_raw"][n] for n in d.subtask_names]))
            assert (m.precision, m.recall) == (r["precision"], r["recall"])
            assert r["feasible"] == (m.precision >= r["target_precision"])

    def test_single_method_rejected(self, binary_csv):
        assert run("compare", "--input", binary_csv, "--expression", "s0 OR s1",
                   "--target-precision", 0.9, "--methods", "trusthresh") == 2

    def test_micro_f1(self, multilabel_csv, tmp_path):
        out = tmp_path / "c.json"
        assert run("compare", "--input", multilabel_csv, "--objective", "micro_f1",
                   "--methods", "default,trusthresh", "--output", out) == 0
        rows = read(out)["rows"]
        assert rows[1]["f1"] >= rows[0]["f1"]


class TestOracle:
    def test_oracle(self, binary_csv, tmp_path):
        out = tmp_path / "o.json"
        assert run("oracle", "--input", binary_csv, "--expression", "s0 OR s1",
                   "--target-precision", 0.9, "--grid-size", 21, "--output", out) == 0
        report = read(out)
        assert report["cells_evaluated"] == 441 and report["feasible"]


def test_entry_point(binary_csv, tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run(
        [sys.executable, "-m", "thresholdctl.cli", "fit", "--input", str(binary_csv),
         "--expression", "s0 OR s1", "--target-precision", "0.9", "--iterations", "200",
         "--output", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert read(out)["iterations_run"] == 200


def test_argparse_bad_choice_exits_2(binary_csv):
    with pytest.raises(SystemExit) as info:
        run("fit", "--input", binary_csv, "--objective", "auc")
    assert info.value.code == 2
