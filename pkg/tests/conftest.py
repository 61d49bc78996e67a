import numpy as np
import pytest

from wpalign.core import normalize_matrix
from wpalign.procrustes import random_orthogonal

ACCEPTANCE_RESULTS = []


def unit_rows(rng, n, d):
    return normalize_matrix(rng.standard_normal((n, d)))


def permuted_copy(rng, z):
    """``(y, p)`` with ``y[p[i]] == z[i]``."""
    p = rng.permutation(z.shape[0])
    y = np.empty_like(z)
    y[p] = z
    return y, p


def hub_fixture(seed, n=60, d=20, hub=7):
    rng = np.random.default_rng(seed)
    c = normalize_matrix(rng.standard_normal((1, d)))
    x = normalize_matrix(c + 0.6 * rng.standard_normal((n, d)) / np.sqrt(d))
    y = normalize_matrix(c + 0.6 * rng.standard_normal((n, d)) / np.sqrt(d))
    y[hub] = normalize_matrix(x.mean(0, keepdims=True))[0]
    return x, y, hub


@pytest.fixture
def rng():
    return np.random.default_rng(20240614)


@pytest.fixture
def ortho():
    return random_orthogonal


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
