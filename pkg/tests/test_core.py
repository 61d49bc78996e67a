import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wpalign.core import (
    EmbeddingSpace,
    OrthogonalMap,
    PermutationMap,
    apply_permutation,
    compose,
    frobenius_alignment_cost,
    gram_cross,
    invert,
    normalize_rows,
    nuclear_norm_objective,
    svd_factors,
)
from wpalign.errors import DimensionMismatch, InvalidPermutation, NonOrthogonal, ZeroVector
from wpalign.procrustes import procrustes, random_orthogonal

from conftest import unit_rows


def space(m):
    return EmbeddingSpace.from_matrix(np.asarray(m, dtype=float))


class TestTypes:
    def test_embedding_space_rejects_duplicates(self):
        with pytest.raises(ValueError):
            EmbeddingSpace(["a", "a"], np.ones((2, 2)))

    def test_embedding_space_rejects_row_count_mismatch(self):
        with pytest.raises(ValueError):
            EmbeddingSpace(["a"], np.ones((2, 2)))

    def test_normalized_flag_checked(self):
        with pytest.raises(ValueError):
            EmbeddingSpace(["a"], [[3.0, 4.0]], normalized=True)

    def test_vectors_are_read_only(self):
        s = space([[1.0, 2.0]])
        with pytest.raises(ValueError):
            s.vectors[0, 0] = 5.0

    def test_orthogonal_map_rejects_non_orthogonal(self):
        with pytest.raises(NonOrthogonal):
            OrthogonalMap([[1.0, 0.5], [0.0, 1.0]])

    def test_orthogonal_map_tolerance_scales_with_d(self):
        w = np.eye(4)
        w[0, 0] += 1e-6  # ||W^T W - I|| ~ 2e-6 < 4e-6
        OrthogonalMap(w)

    @pytest.mark.parametrize("bad", [[0, 0, 1], [0, 3, 1], [-1, 0, 1]])
    def test_permutation_must_be_bijection(self, bad):
        with pytest.raises(InvalidPermutation):
            PermutationMap(bad)

    def test_apply_permutation_convention(self):
        y = np.arange(6.0).reshape(3, 2)
        p = PermutationMap([2, 0, 1])
        np.testing.assert_array_equal(apply_permutation(p, y), y[[2, 0, 1]])

    def test_compose_matches_sequential_application(self, rng):
        y = rng.standard_normal((7, 3))
        p, q = PermutationMap(rng.permutation(7)), PermutationMap(rng.permutation(7))
        np.testing.assert_array_equal(apply_permutation(compose(p, q), y), apply_permutation(q, apply_permutation(p, y)))


@settings(max_examples=60, deadline=None)
@given(st.permutations(list(range(9))))
def test_permutation_round_trip(f):
    p = PermutationMap(f)
    assert invert(invert(p)) == p
    assert compose(p, invert(p)).is_identity()
    assert compose(invert(p), p).is_identity()


class TestNormalizeRows:
    def test_3_4_5(self):
        out = normalize_rows(space([[3.0, 4.0]]))
        np.testing.assert_allclose(out.vectors, [[0.6, 0.8]])
        assert out.normalized

    def test_unit_row_unchanged(self):
        np.testing.assert_array_equal(normalize_rows(space([[1.0, 0.0]])).vectors, [[1.0, 0.0]])

    def test_random_norms(self, rng):
        s = space(rng.standard_normal((10, 5)))
        out = normalize_rows(s)
        norms = [np.sqrt(sum(v * v for v in row)) for row in out.vectors]
        np.testing.assert_allclose(norms, 1.0, atol=1e-9)
        assert out.words == s.words

    def test_zero_row(self):
        s = EmbeddingSpace(["a", "zero"], [[1.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ZeroVector) as exc:
            normalize_rows(s)
        assert exc.value.context["word"] == "zero"


class TestGramCross:
    def test_identity(self):
        np.testing.assert_array_equal(gram_cross(np.eye(2), np.eye(2)), np.eye(2))

    def test_swapped(self):
        np.testing.assert_array_equal(gram_cross(np.eye(2), np.eye(2)[::-1]), [[0, 1], [1, 0]])

    def test_naive_loop(self, rng):
        x, y = rng.standard_normal((4, 3)), rng.standard_normal((4, 3))
        naive = np.zeros((4, 4))
        for i in range(4):
            for j in range(4):
                for k in range(3):
                    naive[i, j] += x[i, k] * y[j, k]
        np.testing.assert_allclose(gram_cross(space(x), space(y)), naive, atol=1e-12)

    def test_blocked_float32(self, rng):
        x, y = rng.standard_normal((37, 5)), rng.standard_normal((37, 5))
        g = gram_cross(x, y, dtype=np.float32, block_rows=8)
        assert g.dtype == np.float32
        np.testing.assert_allclose(g, x @ y.T, atol=1e-5)

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            gram_cross(np.eye(2), np.eye(3))
        with pytest.raises(DimensionMismatch):
            gram_cross(np.ones((3, 2)), np.ones((2, 2)))


def _sv_sum_oracle(m):
    # eigenvalues of M^T M are the squared singular values
    return float(np.sqrt(np.clip(np.linalg.eigvalsh(m.T @ m), 0, None)).sum())


class TestNuclearNormObjective:
    def test_identity(self):
        assert nuclear_norm_objective(np.eye(2), PermutationMap.identity(2), np.eye(2)) == pytest.approx(2.0)

    def test_psd_case(self, rng):
        x = rng.standard_normal((8, 3))
        val = nuclear_norm_objective(x, PermutationMap.identity(8), x)
        assert val == pytest.approx(np.sum(x * x), rel=1e-12)

    def test_against_independent_svd(self, rng):
        import itertools

        x, y = rng.standard_normal((6, 3)), rng.standard_normal((6, 3))
        best = max(itertools.permutations(range(6)), key=lambda f: np.trace(x.T @ y[list(f)]))
        p = PermutationMap(best)
        explicit = np.zeros((3, 3))
        for i in range(6):
            explicit += np.outer(x[i], y[p[i]])
        assert nuclear_norm_objective(x, p, y) == pytest.approx(_sv_sum_oracle(explicit), rel=1e-9)

    def test_non_negative(self, rng):
        x, y = rng.standard_normal((5, 2)), -rng.standard_normal((5, 2))
        assert nuclear_norm_objective(x, PermutationMap.identity(5), y) >= 0


class TestFrobeniusCost:
    def test_exact(self, rng):
        x = rng.standard_normal((6, 3))
        w = random_orthogonal(3, rng)
        assert frobenius_alignment_cost(x, w, PermutationMap.identity(6), x @ w) == pytest.approx(0.0, abs=1e-24)

    def test_scaled_identity(self):
        assert frobenius_alignment_cost(np.eye(2), np.eye(2), PermutationMap.identity(2), 2 * np.eye(2)) == 2.0

    def test_expansion(self, rng):
        x, y = rng.standard_normal((9, 4)), rng.standard_normal((9, 4))
        w = random_orthogonal(4, rng)
        p = PermutationMap(rng.permutation(9))
        inner = sum(float(np.dot(x[i] @ w, y[p[i]])) for i in range(9))
        expected = np.sum(x ** 2) + np.sum(y ** 2) - 2 * inner
        assert frobenius_alignment_cost(x, w, p, y) == pytest.approx(expected, rel=1e-9)


class TestSvdFactors:
    def test_invariants(self, rng):
        a = rng.standard_normal((12, 5))
        f = svd_factors(a)
        assert np.all(np.diff(f.sigma) <= 0) and np.all(f.sigma >= 0)
        np.testing.assert_allclose(f.u.T @ f.u, np.eye(5), atol=1e-6)
        np.testing.assert_allclose(f.v.T @ f.v, np.eye(5), atol=1e-6)
        assert np.linalg.norm(f.reconstruct() - a) / np.linalg.norm(a) < 1e-6


class TestProperties:
    def test_orthogonal_invariance(self, rng):
        for _ in range(20):
            x, y = rng.standard_normal((15, 4)), rng.standard_normal((15, 4))
            p = PermutationMap(rng.permutation(15))
            q = random_orthogonal(4, rng)
            a, b = nuclear_norm_objective(x, p, y), nuclear_norm_objective(x @ q, p, y)
            assert abs(a - b) <= 1e-8 * a

    def test_procrustes_identity(self, rng):
        for _ in range(20):
            x, y = unit_rows(rng, 20, 5), unit_rows(rng, 20, 5)
            p = PermutationMap(rng.permutation(20))
            w = procrustes(x, apply_permutation(p, y))
            lhs = frobenius_alignment_cost(x, w, p, y)
            rhs = np.sum(x ** 2) + np.sum(y ** 2) - 2 * nuclear_norm_objective(x, p, y)
            assert abs(lhs - rhs) <= 1e-8 * (np.sum(x ** 2) + np.sum(y ** 2))

    def test_reduced_coordinates(self, rng):
        for _ in range(20):
            x, y = rng.standard_normal((15, 4)), rng.standard_normal((15, 4))
            p = PermutationMap(rng.permutation(15))
            fx, fy = svd_factors(x), svd_factors(y)
            xt, yt = fx.u * fx.sigma, fy.u * fy.sigma
            a = nuclear_norm_objective(x, p, y)
            assert abs(nuclear_norm_objective(xt, p, yt) - a) <= 1e-8 * a
