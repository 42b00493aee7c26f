"""Shared pytest plumbing for the acceptance gate.

test_acceptance.py appends one verdict line per criterion; printing them in
a terminal-summary section keeps the pass/fail lines visible even though
pytest swallows stdout of passing tests.
"""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
