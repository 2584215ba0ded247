"""Scoreboard for the acceptance criteria.

Prints one `criterion N: PASS` / `criterion N: FAIL` line per acceptance test
in the terminal summary, where output capture cannot swallow it.
"""

import re

_CRITERIA = {}
_PATTERN = re.compile(r"test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call":
        _CRITERIA[n] = report.passed and _CRITERIA.get(n, True)
    elif report.failed:  # setup or teardown error
        _CRITERIA[n] = False


def pytest_terminal_summary(terminalreporter):
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if _CRITERIA[n] else 'FAIL'}")
