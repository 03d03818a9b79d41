"""Shared fixtures and the per-criterion pass/fail summary."""

from __future__ import annotations

import time
from collections import defaultdict

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "properties",
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("properties")

CRITERIA = {
    1: "closed-form R reproduction",
    2: "exact oracle equivalence on finite populations",
    3: "ACE oracle agreement on discretized laws",
    4: "diagonal-structure verification",
    5: "Monte Carlo characterization suite",
    6: "identity suite",
    7: "property suite",
    8: "unit-disc counterexample",
}

_outcomes: dict[int, list[bool]] = defaultdict(list)
_durations: dict[int, float] = defaultdict(float)


def pytest_runtest_logreport(report):
    crit = getattr(report, "_criterion", None)
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes[crit].append(report.outcome == "passed")
        _durations[crit] += report.duration


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        rep._criterion = int(marker.args[0])


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_outcomes):
        res = _outcomes[crit]
        status = "PASS" if all(res) else "FAIL"
        tr.write_line(
            f"criterion {crit}: {status}  ({sum(res)}/{len(res)} tests, {_durations[crit]:.1f} s)  "
            f"{CRITERIA.get(crit, '')}"
        )


@pytest.fixture
def stopwatch():
    """Returns a callable giving seconds since the fixture was created."""
    t0 = time.perf_counter()
    return lambda: time.perf_counter() - t0
