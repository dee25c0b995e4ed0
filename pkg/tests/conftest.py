from __future__ import annotations


def pytest_terminal_summary(terminalreporter):
    import test_acceptance as acc

    if acc.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(acc.RESULTS):
            terminalreporter.write_line(acc.line(k))
