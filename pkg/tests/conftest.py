"""Shared test plumbing: the acceptance gate prints its verdict lines here."""

#: one "[PASS]"/"[FAIL]" line per acceptance criterion, in run order
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
