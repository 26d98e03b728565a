"""Score files (CSV / JSONL) and the JSON fit report."""

from __future__ import annotations

import csv
import json
import math
import os
from pathlib import Path

import numpy as np

from .core import Dataset, FitResult, MultiLabelDataset, build_dataset, build_multilabel_dataset
from .errors import InconsistentKeys, MissingLabelColumn, NonNumericScore, ParseError

SCHEMA_VERSION = "1"
LABEL = "label"
LABEL_PREFIX = "label_"


def _number(text, line, column):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise NonNumericScore(f"non-numeric score {text!r}", line, column) from None
    if math.isnan(value):
        raise NonNumericScore("score is NaN", line, column)
    return value


def _label(value, line, column):
    if isinstance(value, str):
        value = value.strip()
    if value in (0, 1, "0", "1") and not isinstance(value, bool):
        return int(value)
    raise ParseError(f"label must be 0 or 1, got {value!r}", line, column)


def infer_format(path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix in (".jsonl", ".ndjson"):
        return "jsonl"
    return "csv"


def load_dataset(path, fmt: str | None = None) -> Dataset | MultiLabelDataset:
    """Read a score file.

    A single ``label`` column/key gives a :class:`Dataset`; ``label_<class>``
    columns (CSV) or a ``labels`` map (JSONL) give a
    :class:`MultiLabelDataset`.
    """
    fmt = fmt or infer_format(path)
    if fmt == "csv":
        return _load_csv(path)
    if fmt == "jsonl":
        return _load_jsonl(path)
    raise ParseError(f"unknown input format {fmt!r}")


def _load_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("empty file", 1) from None
        rows = [(reader.line_num, row) for row in reader if any(cell.strip() for cell in row)]

    if LABEL in header:
        multilabel = False
        score_cols = [h for h in header if h != LABEL]
        label_cols = [LABEL]
    else:
        label_cols = [h for h in header if h.startswith(LABEL_PREFIX)]
        if not label_cols:
            raise MissingLabelColumn(f"no {LABEL!r} or {LABEL_PREFIX}<class> column", 1)
        multilabel = True
        score_cols = [h for h in header if not h.startswith(LABEL_PREFIX)]
        classes = [h[len(LABEL_PREFIX):] for h in label_cols]
        if sorted(classes) != sorted(score_cols):
            raise ParseError("label_<class> columns must match the score columns one to one", 1)
        # keep header order of the score columns
        label_cols = [LABEL_PREFIX + c for c in score_cols]

    position = {h: k for k, h in enumerate(header)}
    scores, labels = [], []
    for line, row in rows:
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", line)
        scores.append([_number(row[position[c]], line, c) for c in score_cols])
        labels.append([_label(row[position[c]], line, c) for c in label_cols])
    scores = np.array(scores, dtype=np.float64).reshape(len(rows), len(score_cols))
    labels = np.array(labels, dtype=np.int8).reshape(len(rows), len(label_cols))
    if multilabel:
        return build_multilabel_dataset(score_cols, scores, labels)
    return build_dataset(score_cols, scores, labels[:, 0])


def _load_jsonl(path):
    keys = None
    multilabel = None
    scores, labels = [], []
    with open(path) as fh:
        for line_no, text in enumerate(fh, start=1):
            if not text.strip():
                continue
            try:
                record = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line_no) from None
            if not isinstance(record, dict) or not isinstance(record.get("scores"), dict):
                raise ParseError("each line must be an object with a 'scores' map", line_no)
            rec_scores = record["scores"]
            if keys is None:
                keys = list(rec_scores)
            elif set(rec_scores) != set(keys):
                raise InconsistentKeys(f"score keys {sorted(rec_scores)} differ from {sorted(keys)}", line_no)
            row = []
            for k in keys:
                v = rec_scores[k]
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise NonNumericScore(f"non-numeric score {v!r}", line_no, k)
                row.append(float(v))
            scores.append(row)

            if "labels" in record:
                this_multi = True
                lab = record["labels"]
                if not isinstance(lab, dict) or set(lab) != set(keys):
                    raise InconsistentKeys("'labels' keys must match the score keys", line_no)
                labels.append([_label(lab[k], line_no, k) for k in keys])
            elif LABEL in record:
                this_multi = False
                labels.append([_label(record[LABEL], line_no, LABEL)])
            else:
                raise MissingLabelColumn("record has no 'label' or 'labels'", line_no)
            if multilabel is None:
                multilabel = this_multi
            elif multilabel != this_multi:
                raise InconsistentKeys("mixing 'label' and 'labels' records", line_no)
    if keys is None:
        raise ParseError("no records found")
    scores = np.array(scores, dtype=np.float64)
    labels = np.array(labels, dtype=np.int8)
    if multilabel:
        return build_multilabel_dataset(keys, scores, labels)
    return build_dataset(keys, scores, labels[:, 0])


# ------------------------------------------------------------------ report

def _named(names, values):
    if values is None:
        return None
    return {n: float(v) for n, v in zip(names, values)}


def trace_to_json(trace):
    return [
        {
            "iteration": t.iteration,
            "loss": t.loss,
            "precision": t.precision,
            "recall": t.recall,
            "f1": t.f1,
            "tau_hat": list(t.tau_hat),
            "spread": list(t.spread),
        }
        for t in trace
    ]


def fit_report(result: FitResult, config_echo: dict, wall_time_ms: float,
               include_trace: bool = False) -> dict:
    names = result.subtask_names
    report = {
        "schema_version": SCHEMA_VERSION,
        "method": result.method,
        "objective": result.objective,
        "config": config_echo,
        "subtask_names": list(names),
        "thresholds_raw": _named(names, result.thresholds_raw),
        "thresholds_normalized": _named(names, result.thresholds_normalized),
        "widths": _named(names, result.widths),
        "sigma": _named(names, result.sigma),
        "normalization": (
            {n: m.to_dict() for n, m in zip(names, result.maps)} if result.maps is not None else None
        ),
        "metrics": {"precision": result.precision, "recall": result.recall, "f1": result.f1},
        "target_precision": result.target_precision,
        "feasible": bool(result.feasible),
        "iterations_run": int(result.iterations_run),
        "best_iteration": result.best_iteration,
        "wall_time_ms": float(wall_time_ms),
    }
    if include_trace:
        report["trace"] = trace_to_json(result.trace)
    return report


def write_json(obj, path=None):
    # float repr is the shortest string that round-trips, so values stay bit-exact
    text = json.dumps(obj, indent=2, allow_nan=False)
    if path is None or path == "-":
        print(text)
    else:
        tmp = f"{path}.tmp"
        with open(tmp, "w") as fh:
            fh.write(text + "\n")
        os.replace(tmp, path)


def report_schema() -> dict:
    with open(Path(__file__).with_name("report_schema.json")) as fh:
        return json.load(fh)
