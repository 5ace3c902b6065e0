import pytest
from hypothesis import settings

from infrate import load_bundled_cpi

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

_ACCEPTANCE = {}
_NOTES = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): acceptance criterion label")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            item.user_properties.append(("acceptance", mark.args[0]))


def pytest_runtest_logreport(report):
    labels = [v for k, v in report.user_properties if k == "acceptance"]
    if not labels:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        ok = report.passed
        for label in labels:
            _ACCEPTANCE[label] = _ACCEPTANCE.get(label, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[0][2:])):
        tr.write_line(f"{'PASS' if _ACCEPTANCE[label] else 'FAIL'}  {label}")
    for line in _NOTES:
        tr.write_line(f"      {line}")


@pytest.fixture
def note():
    """Record an informational line for the acceptance summary."""
    return _NOTES.append


@pytest.fixture(scope="session")
def cpi_end():
    return load_bundled_cpi("bundled", convention="end")


@pytest.fixture(scope="session")
def cpi_start():
    return load_bundled_cpi("bundled", convention="start")


@pytest.fixture(scope="session")
def cpi_printed():
    return load_bundled_cpi("bundled-printed", convention="end")
