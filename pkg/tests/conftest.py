import re
from collections import defaultdict

import pytest

from atimers import parse_at, parse_run_word, run_from_word, two_timer_source

from golden import WORDS

_CRITERION = re.compile(r"test_criterion_(\d+)")
_outcomes = defaultdict(list)


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if m and (report.when == "call" or not report.passed):
        _outcomes[int(m.group(1))].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        verdict = "PASS" if all(_outcomes[n]) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {verdict}")


@pytest.fixture(scope="session")
def two_timer():
    return parse_at(two_timer_source())


@pytest.fixture(scope="session")
def runs(two_timer):
    return {name: run_from_word(two_timer, *parse_run_word(w)) for name, w in WORDS.items()}
