import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from wpalign import _accel
from wpalign.core import PermutationMap
from wpalign.errors import DimensionMismatch, NonFinite, TooLarge
from wpalign.lap import (
    CostMatrix,
    brute_force_assignment,
    constrained_match_step,
    match_step,
    solve_assignment,
)

from conftest import unit_rows

BACKENDS = [pytest.param(False, id="numpy")]
if _accel.HAS_NUMBA:
    BACKENDS.append(pytest.param(True, id="numba"))


def exhaustive_min(c):
    n = c.shape[0]
    return min(sum(c[i, f[i]] for i in range(n)) for f in itertools.permutations(range(n)))


@pytest.mark.parametrize("use_numba", BACKENDS)
class TestSolveAssignment:
    def test_diagonal(self, use_numba):
        p, total = solve_assignment([[1, 2], [2, 1]], use_numba=use_numba)
        assert p == PermutationMap([0, 1]) and total == 2

    @pytest.mark.parametrize("n", [1, 2, 5, 30])
    def test_zero_matrix(self, n, use_numba):
        p, total = solve_assignment(np.zeros((n, n)), use_numba=use_numba)
        assert len(p) == n and total == 0

    def test_random_7x7_against_factorial_search(self, use_numba):
        rng = np.random.default_rng(7)
        for _ in range(100):
            c = rng.standard_normal((7, 7))
            p, total = solve_assignment(c, use_numba=use_numba)
            assert total == pytest.approx(exhaustive_min(c), abs=1e-12)
            assert total == pytest.approx(c[np.arange(7), p.forward].sum(), rel=1e-9)

    def test_integer_ties(self, use_numba):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = int(rng.integers(2, 8))
            c = rng.integers(0, 3, size=(n, n)).astype(float)
            assert solve_assignment(c, use_numba=use_numba)[1] == brute_force_assignment(c)[1]

    def test_float32_input(self, use_numba):
        rng = np.random.default_rng(5)
        c = rng.standard_normal((6, 6)).astype(np.float32)
        assert solve_assignment(c, use_numba=use_numba)[1] == pytest.approx(brute_force_assignment(c)[1], abs=1e-5)

    def test_scale_equivariance(self, use_numba):
        rng = np.random.default_rng(11)
        for _ in range(30):
            c = rng.standard_normal((6, 6))
            _, t1 = solve_assignment(c, use_numba=use_numba)
            p2, t2 = solve_assignment(4.0 * c, use_numba=use_numba)
            assert t2 == pytest.approx(4.0 * t1, rel=1e-12)
            assert c[np.arange(6), p2.forward].sum() == pytest.approx(t1, rel=1e-12)

    def test_non_finite(self, use_numba):
        for bad in (np.nan, np.inf):
            c = np.zeros((3, 3))
            c[1, 2] = bad
            with pytest.raises(NonFinite):
                solve_assignment(c, use_numba=use_numba)


def test_backends_agree_on_medium_problem():
    rng = np.random.default_rng(2)
    c = rng.random((150, 150))
    _, a = solve_assignment(c, use_numba=False)
    _, b = solve_assignment(c, use_numba=True)
    from scipy.optimize import linear_sum_assignment

    r, k = linear_sum_assignment(c)
    assert a == pytest.approx(c[r, k].sum(), rel=1e-12)
    assert b == pytest.approx(c[r, k].sum(), rel=1e-12)


@settings(max_examples=80, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.just(1)).map(lambda s: (s[0], s[0])),
              elements=st.floats(-100, 100, allow_nan=False, width=32)))
def test_optimality_property(c):
    p, total = solve_assignment(c)
    assert sorted(p.forward.tolist()) == list(range(c.shape[0]))
    assert total == pytest.approx(brute_force_assignment(c)[1], rel=1e-9, abs=1e-9)


def test_non_square():
    with pytest.raises(DimensionMismatch):
        CostMatrix(np.zeros((2, 3)))


class TestBruteForce:
    def test_small(self):
        assert brute_force_assignment([[1, 2], [2, 1]])[1] == 2

    def test_single(self):
        p, total = brute_force_assignment([[5]])
        assert p.is_identity() and total == 5

    def test_agrees_with_solver_5x5(self, rng):
        for _ in range(20):
            c = rng.standard_normal((5, 5))
            assert brute_force_assignment(c)[1] == pytest.approx(solve_assignment(c)[1], abs=1e-12)

    def test_too_large(self):
        with pytest.raises(TooLarge):
            brute_force_assignment(np.zeros((10, 10)))


class TestMatchStep:
    def test_self_is_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(6):
            x = unit_rows(rng, 6, 3)
            p = match_step(x, x)
            best = max(itertools.permutations(range(6)), key=lambda f: sum(x[i] @ x[f[i]] for i in range(6)))
            assert p.is_identity() and tuple(best) == tuple(range(6))

    def test_swapped_rows(self):
        rng = np.random.default_rng(1)
        x = unit_rows(rng, 6, 3)
        y = x[[1, 0, 2, 3, 4, 5]]
        assert match_step(x, y) == PermutationMap([1, 0, 2, 3, 4, 5])

    def test_anti_diagonal(self):
        assert match_step(np.eye(2), [[0.0, 1.0], [1.0, 0.0]]) == PermutationMap([1, 0])

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            match_step(np.eye(3), np.eye(2))

    def test_float32_similarities(self, rng):
        x, y = unit_rows(rng, 40, 4), unit_rows(rng, 40, 4)
        a = match_step(x, y, dtype=np.float64)
        b = match_step(x, y, dtype=np.float32)
        ta, tb = (np.sum(x * y[p.forward]) for p in (a, b))
        assert tb == pytest.approx(ta, abs=1e-5)


def test_constrained_match_step_honors_pins(rng):
    x = unit_rows(rng, 8, 3)
    p = constrained_match_step(x, x, [0, 3], [5, 1])
    assert p[0] == 5 and p[3] == 1
    assert sorted(p.forward.tolist()) == list(range(8))
    # remaining block is solved exactly
    free_r = [1, 2, 4, 5, 6, 7]
    free_c = [0, 2, 3, 4, 6, 7]
    best = max(itertools.permutations(free_c), key=lambda f: sum(x[r] @ x[c] for r, c in zip(free_r, f)))
    got = sum(x[r] @ x[p[r]] for r in free_r)
    assert got == pytest.approx(sum(x[r] @ x[c] for r, c in zip(free_r, best)), abs=1e-12)
