import pytest

from pathmeasure.twoslit import SlitConfig, SlitSelection, screen_classical, screen_quantum

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def default_config():
    return SlitConfig()


@pytest.fixture(scope="session")
def quantum_screens(default_config):
    return {s: screen_quantum(default_config, s) for s in SlitSelection}


@pytest.fixture(scope="session")
def classical_screens(default_config):
    return {s: screen_classical(default_config, s, seed=11) for s in SlitSelection}


@pytest.fixture
def criterion():
    """Record an acceptance criterion result for the end-of-run summary."""

    def record(name: str, passed: bool, detail: str = "") -> bool:
        _ACCEPTANCE.append((name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
