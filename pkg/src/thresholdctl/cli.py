"""``thresholdctl`` command line: fit, compare, oracle, eval.

Exit codes: 0 success (feasible fit), 1 input error, 2 configuration
error, 3 infeasible fit (the report is still written).
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np
import yaml

from .baselines import def_thresh, greedy_thresh, sgl_default_config, sgl_thresh_fit
from .core import FitConfig, MultiLabelDataset
from .datafiles import fit_report, load_dataset, trace_to_json, write_json
from .errors import ConfigError, ThresholdError
from .expr import PRESETS, parse_and_bind
from .oracle import grid_oracle
from .optimizer import Problem, fit, fit_multilabel

METHODS = ("trusthresh", "sglthresh", "greedy", "default")
EXIT_OK, EXIT_INPUT, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2, 3


@dataclass
class RunConfig:
    input_path: str | None = None
    input_format: str | None = None
    expression: str | None = None
    preset: str | None = None
    method: str = "trusthresh"
    methods: list = field(default_factory=list)
    objective: str = "recall_at_precision"
    target_precision: float | None = None
    targets: list = field(default_factory=list)
    alpha: float | None = None
    learning_rate: float | None = None
    iterations: int | None = None
    tau_init: float | None = None
    width_init: float | None = None
    sigma_init: float = 50.0
    default_tau: float = 0.5
    grid_size: int | None = None
    max_sweeps: int = 10
    normalize_scores: bool | None = None
    learn_widths: bool = True
    update_rule: str = "adam"
    output_path: str | None = None
    report_path: str | None = None
    thresholds: str | None = None
    trace: bool = False

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
        return cls(**values)

    def echo(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if v not in (None, [])}


# ---------------------------------------------------------------- helpers

def _resolve_expression(cfg: RunConfig, names):
    if cfg.preset is not None:
        if cfg.expression is not None:
            raise ConfigError("give either an expression or a preset, not both")
        if cfg.preset not in PRESETS:
            raise ConfigError(f"unknown preset {cfg.preset!r}; choose from {', '.join(PRESETS)}")
        return PRESETS[cfg.preset](names)
    text = cfg.expression
    if text is not None and os.path.isfile(text):
        with open(text) as fh:
            text = fh.read()
    return parse_and_bind(text or "", names)


def validate(cfg: RunConfig, command: str):
    """Cross-field checks; raises ConfigError."""
    if cfg.input_path is None:
        raise ConfigError("an input file is required")
    if cfg.input_format not in (None, "csv", "jsonl"):
        raise ConfigError(f"unknown input format {cfg.input_format!r}")
    if cfg.objective not in ("recall_at_precision", "micro_f1"):
        raise ConfigError(f"unknown objective {cfg.objective!r}")
    has_expr = cfg.expression is not None or cfg.preset is not None
    if cfg.objective == "micro_f1":
        if has_expr:
            raise ConfigError("micro_f1 thresholds classes independently; drop the expression")
        if cfg.target_precision is not None or cfg.targets:
            raise ConfigError("micro_f1 takes no target precision")
    elif command != "eval":
        if not has_expr:
            raise ConfigError("recall_at_precision needs an expression or preset")
        if command == "compare":
            if cfg.target_precision is None and not cfg.targets:
                raise ConfigError("recall_at_precision needs --target-precision or --targets")
        elif cfg.target_precision is None:
            raise ConfigError("recall_at_precision needs a target precision")
    if command == "fit" and cfg.method not in METHODS:
        raise ConfigError(f"unknown method {cfg.method!r}")
    if command == "compare":
        if len(cfg.methods) < 2:
            raise ConfigError("compare needs at least two methods")
        bad = [m for m in cfg.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown methods: {', '.join(bad)}")
    for t in cfg.targets:
        if not 0.0 < t <= 1.0:
            raise ConfigError(f"target {t} outside (0, 1]")


def _fit_config(cfg: RunConfig, method: str, target: float | None) -> FitConfig:
    overrides = {
        k: getattr(cfg, k)
        for k in ("alpha", "learning_rate", "iterations", "tau_init", "width_init", "normalize_scores")
        if getattr(cfg, k) is not None
    }
    overrides.update(objective=cfg.objective, learn_widths=cfg.learn_widths,
                     update_rule=cfg.update_rule)
    if target is not None:
        overrides["target_precision"] = target
    try:
        if method == "sglthresh":
            return sgl_default_config(**overrides)
        return FitConfig(**overrides)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def run_method(method, data, expr, cfg: RunConfig, target):
    objective = cfg.objective
    if method == "default":
        return def_thresh(data, expr, cfg.default_tau, target or 1.0, objective)
    if method == "greedy":
        return greedy_thresh(data, expr, target or 1.0, cfg.grid_size or 101, cfg.max_sweeps, objective)
    config = _fit_config(cfg, method, target)
    if method == "sglthresh":
        return sgl_thresh_fit(data, expr, config, cfg.sigma_init)
    if isinstance(data, MultiLabelDataset):
        return fit_multilabel(data, config=config)
    return fit(data, expr, config)


def _load(cfg: RunConfig):
    data = load_dataset(cfg.input_path, cfg.input_format)
    multilabel = isinstance(data, MultiLabelDataset)
    if multilabel and cfg.objective != "micro_f1":
        raise ConfigError("multi-label input requires objective micro_f1")
    if not multilabel and cfg.objective == "micro_f1":
        raise ConfigError("micro_f1 requires multi-label input (label_<class> columns)")
    expr = None if multilabel else _resolve_expression(cfg, data.subtask_names)
    return data, expr


# --------------------------------------------------------------- commands

def run_fit(cfg: RunConfig) -> int:
    validate(cfg, "fit")
    data, expr = _load(cfg)
    start = time.perf_counter()
    result = run_method(cfg.method, data, expr, cfg, cfg.target_precision)
    elapsed = (time.perf_counter() - start) * 1000.0
    write_json(fit_report(result, cfg.echo(), elapsed, cfg.trace), cfg.output_path)
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def run_compare(cfg: RunConfig) -> int:
    validate(cfg, "compare")
    data, expr = _load(cfg)
    if cfg.objective == "micro_f1":
        targets = [None]
    else:
        targets = cfg.targets or [cfg.target_precision]
    rows, traces = [], {}
    for target in targets:
        for method in cfg.methods:
            start = time.perf_counter()
            result = run_method(method, data, expr, cfg, target)
            rows.append({
                "method": method,
                "target_precision": target,
                "precision": result.precision,
                "recall": result.recall,
                "f1": result.f1,
                "feasible": bool(result.feasible),
                "thresholds_raw": result.raw_threshold_map(),
                "wall_time_ms": (time.perf_counter() - start) * 1000.0,
            })
            if cfg.trace and result.trace:
                traces[f"{method}@{target}"] = trace_to_json(result.trace)
    report = {"schema_version": "1", "objective": cfg.objective, "config": cfg.echo(), "rows": rows}
    if cfg.trace:
        report["traces"] = traces
    write_json(report, cfg.output_path)
    return EXIT_OK


def run_oracle(cfg: RunConfig) -> int:
    validate(cfg, "oracle")
    data, expr = _load(cfg)
    res = grid_oracle(data, expr, cfg.grid_size or 101, cfg.target_precision or 1.0, cfg.objective)
    names = getattr(data, "subtask_names", None) or data.class_names
    write_json({
        "schema_version": "1",
        "objective": cfg.objective,
        "target_precision": cfg.target_precision,
        "thresholds": {n: float(t) for n, t in zip(names, res.thresholds)},
        "precision": res.precision,
        "recall": res.recall,
        "f1": res.f1,
        "feasible": res.feasible,
        "grid_size": res.grid_size,
        "cells_evaluated": res.cells_evaluated,
    }, cfg.output_path)
    return EXIT_OK


def _parse_thresholds(text):
    out = {}
    for part in text.split(","):
        name, sep, value = part.partition("=")
        if not sep:
            raise ConfigError(f"threshold {part!r} is not name=value")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"threshold {part!r} has a non-numeric value") from None
    return out


def run_eval(cfg: RunConfig) -> int:
    """Re-score given raw thresholds (from a report or ``--thresholds``) on a file."""
    import json

    report = None
    if cfg.report_path:
        with open(cfg.report_path) as fh:
            report = json.load(fh)
        thresholds = report["thresholds_raw"]
        if cfg.expression is None and cfg.preset is None:
            echo = report.get("config", {})
            cfg.expression = echo.get("expression")
            cfg.preset = echo.get("preset")
        if report.get("objective") == "micro_f1":
            cfg.objective = "micro_f1"
    elif cfg.thresholds:
        thresholds = _parse_thresholds(cfg.thresholds)
    else:
        raise ConfigError("eval needs --report or --thresholds")
    validate(cfg, "eval")
    data, expr = _load(cfg)
    names = getattr(data, "subtask_names", None) or data.class_names
    missing = [n for n in names if n not in thresholds]
    if missing:
        raise ConfigError(f"no threshold for: {', '.join(missing)}")
    values = np.array([thresholds[n] for n in names], dtype=np.float64)
    m = Problem.of(data, expr).evaluate(values)
    out = {
        "thresholds_raw": {n: float(v) for n, v in zip(names, values)},
        "metrics": {"precision": m.precision, "recall": m.recall, "f1": m.f1},
        "counts": {"tp": m.tp, "fp": m.fp, "fn": m.fn, "tn": m.tn},
    }
    target = cfg.target_precision or (report or {}).get("target_precision")
    if target is not None and cfg.objective != "micro_f1":
        out["target_precision"] = target
        out["feasible"] = m.precision >= target
    write_json(out, cfg.output_path)
    return EXIT_OK


COMMANDS = {"fit": run_fit, "compare": run_compare, "oracle": run_oracle, "eval": run_eval}


# ----------------------------------------------------------------- parser

def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _names(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thresholdctl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", dest="config_file", help="YAML/JSON file with RunConfig keys")
    common.add_argument("--input", dest="input_path")
    common.add_argument("--format", dest="input_format", choices=["csv", "jsonl"])
    common.add_argument("--expression", help="decision expression, or a file containing one")
    common.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--objective", choices=["recall_at_precision", "micro_f1"])
    common.add_argument("--target-precision", dest="target_precision", type=float)
    common.add_argument("--output", dest="output_path")

    tuning = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    tuning.add_argument("--alpha", type=float)
    tuning.add_argument("--learning-rate", dest="learning_rate", type=float)
    tuning.add_argument("--iterations", type=int)
    tuning.add_argument("--tau-init", dest="tau_init", type=float)
    tuning.add_argument("--width-init", dest="width_init", type=float)
    tuning.add_argument("--sigma-init", dest="sigma_init", type=float)
    tuning.add_argument("--default-tau", dest="default_tau", type=float)
    tuning.add_argument("--grid-size", dest="grid_size", type=int)
    tuning.add_argument("--max-sweeps", dest="max_sweeps", type=int)
    tuning.add_argument("--update-rule", dest="update_rule", choices=["adam", "sgd"])
    tuning.add_argument("--normalize", dest="normalize_scores", action="store_true")
    tuning.add_argument("--no-normalize", dest="normalize_scores", action="store_false")
    tuning.add_argument("--no-learn-widths", dest="learn_widths", action="store_false")
    tuning.add_argument("--trace", action="store_true")

    p = sub.add_parser("fit", parents=[common, tuning], help="fit thresholds with one method")
    p.add_argument("--method", default=argparse.SUPPRESS)

    p = sub.add_parser("compare", parents=[common, tuning], help="run several methods side by side")
    p.add_argument("--methods", type=_names, default=argparse.SUPPRESS)
    p.add_argument("--targets", type=_floats, default=argparse.SUPPRESS)

    p = sub.add_parser("oracle", parents=[common], help="exhaustive grid search (n <= 3)")
    p.add_argument("--grid-size", dest="grid_size", type=int, default=argparse.SUPPRESS)

    p = sub.add_parser("eval", parents=[common], help="score given thresholds on a file")
    p.add_argument("--report", dest="report_path", default=argparse.SUPPRESS)
    p.add_argument("--thresholds", default=argparse.SUPPRESS, help="name=value,...")
    return parser


def _error(code, message):
    print(f"thresholdctl: {message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    try:
        values = {}
        config_file = args.pop("config_file", None)
        if config_file:
            try:
                with open(config_file) as fh:
                    loaded = yaml.safe_load(fh) or {}
            except (OSError, yaml.YAMLError) as exc:
                raise ConfigError(f"cannot read config file: {exc}") from None
            if not isinstance(loaded, dict):
                raise ConfigError("config file must hold a single mapping")
            values.update(loaded)
        values.update(args)  # flags win over the file
        cfg = RunConfig.from_mapping(values)
        return COMMANDS[command](cfg)
    except ConfigError as exc:
        return _error(EXIT_CONFIG, f"configuration error: {exc}")
    except (ThresholdError, OSError) as exc:
        return _error(EXIT_INPUT, f"input error: {exc}")


if __name__ == "__main__":
    sys.exit(main())
