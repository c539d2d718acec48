"""Shared test plumbing.

The acceptance tests record one human-readable PASS/FAIL line each;
collecting them here lets a terminal-summary hook reprint the whole
scoreboard at the end of the run, where pytest's capture can't hide it.
"""

import pytest

_acceptance_lines = []


@pytest.fixture
def acceptance_report():
    """Record (and echo) one scoreboard line for an acceptance criterion."""

    def record(line):
        _acceptance_lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    del exitstatus, config
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
