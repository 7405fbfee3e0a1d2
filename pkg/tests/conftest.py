import pytest
from hypothesis import settings

from .oracles import DATA

settings.register_profile("default", deadline=None)
settings.load_profile("default")

_acceptance: list[tuple[str, str, str]] = []


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture(autouse=True)
def _no_data_override(monkeypatch):
    monkeypatch.delenv("G2RESTRICT_DATA", raising=False)


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _acceptance.append((name, "PASS" if report.passed else "FAIL", report.when))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, _ in _acceptance:
        terminalreporter.write_line(f"{outcome} {name}")
