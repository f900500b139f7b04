"""Collects the acceptance verdicts and prints one line per criterion."""

ACCEPTANCE = "test_acceptance.py"
_lines: list[str] = []


def pytest_runtest_logreport(report):
    if ACCEPTANCE not in report.nodeid:
        return
    if report.when != "call" and not report.failed:
        return
    props = dict(report.user_properties)
    label = props.get("criterion", report.nodeid.split("::")[-1])
    status = "PASS" if report.passed else "FAIL"
    detail = props.get("detail")
    _lines.append(f"[{status}] {label}" + (f"  ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if _lines:
        terminalreporter.section("acceptance criteria")
        for line in _lines:
            terminalreporter.write_line(line)
