import numpy as np
import pytest
from hypothesis import settings

from subspace_doa.array_sim import ArrayGeometry

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")

# Filled by test_acceptance.py; echoed after the run regardless of capture.
ACCEPTANCE_LINES = []


@pytest.fixture
def mra5():
    return ArrayGeometry.named("mra5")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
