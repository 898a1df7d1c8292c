import pytest

_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    label = dict(report.user_properties).get("acceptance")
    if label is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[label] = report.outcome


@pytest.fixture
def criterion(request):
    """Tag an acceptance test with a label for the end-of-run summary."""

    def tag(label: str) -> None:
        request.node.user_properties.append(("acceptance", label))

    return tag


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in _acceptance.items():
        terminalreporter.write_line("%s  %s" % ("PASS" if outcome == "passed" else "FAIL", label))
