"""Pytest wiring: acceptance-criteria summary lines at the end of the run."""
from __future__ import annotations

import pytest

_acceptance_reports: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    outcome = "PASS" if report.passed else ("FAIL" if report.failed else report.outcome.upper())
    _acceptance_reports.append((report.nodeid.split("::")[-1], outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_reports:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_reports:
        terminalreporter.write_line(f"{outcome}: {name}")


@pytest.fixture(scope="session")
def icu():
    from helpers import icu_model, icu_traces

    model = icu_model()
    table6, table7 = icu_traces()
    return model, table6, table7
