import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("lab", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ex1():
    from orlicz_lab import presets
    return presets.example1()


@pytest.fixture(scope="session")
def ex2():
    from orlicz_lab import presets
    return presets.example2()


@pytest.fixture(scope="session")
def psi1(ex1):
    from orlicz_lab.reproduce import _psi_of
    return _psi_of(ex1)


@pytest.fixture(scope="session")
def psi2(ex2):
    from orlicz_lab.reproduce import _psi_of
    return _psi_of(ex2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
