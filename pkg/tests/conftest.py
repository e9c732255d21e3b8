"""Shared fixtures and the acceptance-criterion report."""

from __future__ import annotations

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

_CRITERIA: dict[str, tuple[str, str]] = {}


@pytest.fixture(autouse=True)
def _default_precision():
    """The CLI sets the working precision process-wide; restore it after every test."""
    from recipstab.exact import DEFAULT_PRECISION_BITS, set_precision

    yield
    set_precision(DEFAULT_PRECISION_BITS)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion covered by this test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    label = getattr(report, "criterion_label", None)
    if label is None:
        return
    outcome = "PASS" if report.outcome == "passed" else "FAIL"
    prev = _CRITERIA.get(label)
    if prev is None or prev[0] == "PASS":
        _CRITERIA[label] = (outcome, report.nodeid)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion_label = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: int(s.split()[0])):
        outcome, nodeid = _CRITERIA[label]
        terminalreporter.write_line(f"{outcome}  criterion {label}")
