import numpy as np
import pytest

from polydet.algebra import GF, PolyMatrix, Polynomial
from polydet.engine import ProtocolContext


def random_polymatrix(F, n, d, rng):
    c = rng.integers(0, F.q, size=(n, n, d + 1))
    return PolyMatrix(F, [[Polynomial(F, [int(v) for v in c[i, j]]) for j in range(n)] for i in range(n)], d)


def worked_example(F):
    """2x2 matrix of degree 3 used throughout the docs and tests."""
    P = lambda *c: Polynomial(F, c)
    return PolyMatrix(F, [[P(2, 3, 7), P(8, 5, 0, 1)], [P(9, 4, 6), P(0, 0, 1, 2)]], 3)


def chi_square_uniform(counts):
    """Pearson statistic against the uniform distribution."""
    counts = np.asarray(counts, dtype=float)
    exp = counts.sum() / len(counts)
    return float(((counts - exp) ** 2 / exp).sum())


# 0.999 quantiles of chi-square with k degrees of freedom
CHI2_999 = {1: 10.828, 2: 13.816, 3: 16.266, 4: 18.467, 5: 20.515, 6: 22.458, 7: 24.322, 8: 26.124}


@pytest.fixture
def F101():
    return GF(101)


@pytest.fixture
def F7():
    return GF(7)


@pytest.fixture
def ctx101():
    return ProtocolContext(GF(101), 3, master_seed=11)


# one line per acceptance criterion, echoed again at the end of the run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
