import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from curvedtori.dirac import assemble_H, make_dirac, random_entries
from curvedtori.metric import LipSeminorm
from curvedtori.torus import make_torus

settings.register_profile(
    "default",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def t2():
    return make_torus(2, 1)


@pytest.fixture(scope="session")
def t3():
    return make_torus(3, 1)


@pytest.fixture(scope="session")
def t4():
    return make_torus(4, 1)


@pytest.fixture(scope="session")
def flat_L2(t2):
    return LipSeminorm.from_dirac(make_dirac(t2), "flat")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_H(torus, seed, magnitude=0.3, band=None, d=2):
    return assemble_H(random_entries(torus, d, np.random.default_rng(seed), magnitude, band))
