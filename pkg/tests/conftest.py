import pytest

from klinokinesis.network import build_default_network
from klinokinesis.ratecode import default_encoder

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def topology():
    return build_default_network(1000)


@pytest.fixture(scope="session")
def encoder():
    return default_encoder(1000)


@pytest.fixture
def report_criterion(request):
    """Call with (number, title, passed, detail); the summary prints one line per criterion."""
    def _report(number, title, passed, detail=""):
        _ACCEPTANCE_LINES.append((number, title, passed, detail))
        return passed
    return _report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE_LINES):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}  {detail}")
