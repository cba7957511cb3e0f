"""Session-wide plumbing: the acceptance-criteria summary printout."""

_results = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "setup" and report.skipped:
        _results.append((name, "SKIP"))
    elif report.when == "setup" and report.failed:
        _results.append((name, "FAIL"))
    elif report.when == "call":
        _results.append((name, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _results:
        terminalreporter.write_line(f"ACCEPTANCE: {name} {status}")
