"""Shared fixtures, the acceptance summary and the session-wide feasibility audit.

Every FitResult built anywhere in the session (library calls, baselines,
CLI runs in-process) passes through ``optimizer.finish`` or
``baselines._result``. Both are wrapped here so each result can be
re-scored from its raw thresholds after the fact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from thresholdctl import baselines, optimizer

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}
FIT_AUDIT: list[tuple[str, bool, str]] = []


def record_criterion(number: int, title: str, passed: bool, detail: str = ""):
    ACCEPTANCE[number] = (title, bool(passed), detail)
    print(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} {detail}")


def audit_result(problem, result):
    """Re-score ``result`` on ``problem`` and return (ok, message)."""
    preds = problem.predict(result.thresholds_raw)
    y = problem.labels.astype(bool)
    p = preds.astype(bool)
    tp = int(np.sum(y & p))
    fp = int(np.sum(~y & p))
    precision = tp / (tp + fp) if tp + fp else 1.0
    if precision != result.precision:
        return False, f"reported precision {result.precision!r} but re-scored {precision!r}"
    if result.objective == "recall_at_precision" and result.feasible:
        if not precision >= result.target_precision:
            return False, f"feasible but precision {precision!r} < {result.target_precision!r}"
    return True, ""


def _audited(func):
    def wrapper(problem, *args, **kwargs):
        result = func(problem, *args, **kwargs)
        ok, message = audit_result(problem, result)
        FIT_AUDIT.append((result.method, ok, message))
        return result

    wrapper.__wrapped__ = func
    return wrapper


def pytest_configure(config):
    optimizer.finish = _audited(optimizer.finish)
    baselines.finish = optimizer.finish
    baselines._result = _audited(baselines._result)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    tr = terminalreporter
    if FIT_AUDIT:
        bad = [m for m in FIT_AUDIT if not m[1]]
        tr.section("feasibility audit")
        tr.write_line(f"{len(FIT_AUDIT)} fit results re-scored from raw thresholds, {len(bad)} violations")
        for method, _, message in bad[:20]:
            tr.write_line(f"  {method}: {message}")
    if ACCEPTANCE:
        tr.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            title, passed, detail = ACCEPTANCE[number]
            tr.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {title}  {detail}")


def pytest_sessionfinish(session, exitstatus):
    if any(not ok for _, ok, _ in FIT_AUDIT) and session.exitstatus == 0:
        session.exitstatus = 1


@pytest.fixture(scope="session")
def derived():
    path = Path(__file__).with_name("fixtures") / "derived.json"
    return json.loads(path.read_text())


@pytest.fixture
def kids_names():
    return ["kids", "weapon", "violence"]
