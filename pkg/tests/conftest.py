import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from lck import linalg as la

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_configure(config):
    config._lck_acceptance = []


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_lck_acceptance", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log(request):
    return request.config._lck_acceptance


@pytest.fixture(scope="session")
def oracles():
    return json.loads((FIXTURES / "oracles.json").read_text())


fractions = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def rational_vectors(draw, n):
    return la.exact_array([draw(fractions) for _ in range(n)])


@st.composite
def rational_spd(draw, n):
    """L L^T with L lower triangular, rational, nonzero diagonal: det is a rational square."""
    lower = la.zeros((n, n), True)
    for i in range(n):
        for j in range(i):
            lower[i, j] = draw(st.fractions(-1, 1, max_denominator=3))
        lower[i, i] = draw(st.sampled_from([Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3, 2)]))
    return lower @ lower.T


def random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n))
    return a @ a.T + n * np.eye(n)
