import math

import numpy as np
import pytest
from hypothesis import strategies as st

from pathspin.hilbert import SPIN, StateVector

phases = st.floats(min_value=0.0, max_value=2 * math.pi, allow_nan=False)

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_spin(rng) -> StateVector:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return StateVector(v / np.linalg.norm(v), SPIN)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
