"""Domain types and shared numerical primitives.

Conventions used throughout the package:

* point clouds are row matrices ``X, Y`` of shape ``(N, d)``;
* a permutation ``p`` acts on rows, ``apply_permutation(p, Y)[i] == Y[p[i]]``,
  so row ``i`` of ``X`` is matched to row ``p[i]`` of ``Y``;
* an orthogonal map ``W`` acts on the right, ``X @ W``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidPermutation,
    LengthMismatch,
    NonFinite,
    NonOrthogonal,
    ZeroVector,
)

ZERO_NORM = 1e-12
UNIT_TOL = 1e-6
ORTHO_TOL = 1e-6


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class EmbeddingSpace:
    """Ordered vocabulary plus one row vector per word."""

    words: tuple
    vectors: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        words = tuple(self.words)
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] < 1 or vectors.shape[1] < 1:
            raise DimensionMismatch(f"vectors must be a non-empty 2-D matrix, got shape {vectors.shape}")
        if len(words) != vectors.shape[0]:
            raise LengthMismatch(f"{len(words)} words for {vectors.shape[0]} vectors")
        if len(set(words)) != len(words):
            raise ValueError("duplicate words in vocabulary")
        if not np.all(np.isfinite(vectors)):
            raise NonFinite("embedding matrix contains NaN or Inf")
        if self.normalized:
            norms = np.linalg.norm(vectors, axis=1)
            if np.any(np.abs(norms - 1.0) > UNIT_TOL):
                raise ValueError("normalized=True but some rows are not unit length")
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "vectors", _readonly(vectors))

    @classmethod
    def from_matrix(cls, vectors, prefix="w", normalized=False):
        """Wrap a bare matrix, labelling rows ``w00000``, ``w00001``, ..."""
        vectors = np.asarray(vectors, dtype=np.float64)
        width = max(5, len(str(max(len(vectors) - 1, 0))))
        words = [f"{prefix}{i:0{width}d}" for i in range(len(vectors))]
        return cls(words, vectors, normalized)

    @property
    def n(self):
        return self.vectors.shape[0]

    @property
    def d(self):
        return self.vectors.shape[1]

    def __len__(self):
        return self.n

    def index(self):
        return {w: i for i, w in enumerate(self.words)}

    def head(self, k):
        """The first ``k`` entries (files are frequency ordered)."""
        k = min(int(k), self.n)
        return EmbeddingSpace(self.words[:k], self.vectors[:k], self.normalized)

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return EmbeddingSpace([self.words[i] for i in indices], self.vectors[indices], self.normalized)


@dataclass(frozen=True, eq=False)
class OrthogonalMap:
    """A ``d x d`` orthogonal matrix, checked on construction.

    ``rank_deficient`` is set by the Procrustes solver when the cross
    product it factored was numerically singular; the map is still valid.
    """

    matrix: np.ndarray
    rank_deficient: bool = False
    tol: float = field(default=ORTHO_TOL, repr=False)

    def __post_init__(self):
        w = np.asarray(self.matrix, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise DimensionMismatch(f"orthogonal map must be square, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise NonFinite("orthogonal map contains NaN or Inf")
        d = w.shape[0]
        err = orthogonality_error(w)
        if err > self.tol * d:
            raise NonOrthogonal(f"||W^T W - I||_F = {err:.3g} exceeds {self.tol * d:.3g}", error=err)
        object.__setattr__(self, "matrix", _readonly(w))

    @classmethod
    def identity(cls, d):
        return cls(np.eye(d))

    @property
    def d(self):
        return self.matrix.shape[0]

    @property
    def T(self):
        return OrthogonalMap(self.matrix.T)

    def __matmul__(self, other):
        if isinstance(other, OrthogonalMap):
            return OrthogonalMap(self.matrix @ other.matrix, tol=max(self.tol, other.tol))
        return NotImplemented


def orthogonality_error(w):
    w = np.asarray(w, dtype=np.float64)
    return float(np.linalg.norm(w.T @ w - np.eye(w.shape[1])))


@dataclass(frozen=True, eq=False)
class PermutationMap:
    """Bijection on ``{0..N-1}`` stored as an index array."""

    forward: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.forward)
        if f.ndim != 1:
            raise InvalidPermutation("permutation must be one-dimensional")
        if f.size and not np.issubdtype(f.dtype, np.integer):
            if not np.all(f == np.round(f)):
                raise InvalidPermutation("permutation entries must be integers")
        f = f.astype(np.int64)
        n = f.size
        if n and (f.min() < 0 or f.max() >= n or np.bincount(f, minlength=n).max() != 1):
            raise InvalidPermutation("forward is not a bijection on 0..N-1")
        object.__setattr__(self, "forward", _readonly(f))

    @classmethod
    def identity(cls, n):
        return cls(np.arange(n, dtype=np.int64))

    def __len__(self):
        return self.forward.size

    def __getitem__(self, i):
        return self.forward[i]

    def __eq__(self, other):
        if not isinstance(other, PermutationMap):
            return NotImplemented
        return np.array_equal(self.forward, other.forward)

    def __hash__(self):
        return hash(self.forward.tobytes())

    def __repr__(self):
        return f"PermutationMap({self.forward.tolist() if len(self) <= 12 else f'<{len(self)} entries>'})"

    def inverse(self):
        inv = np.empty_like(self.forward)
        inv[self.forward] = np.arange(self.forward.size)
        return PermutationMap(inv)

    def compose(self, other):
        """Permutation equal to applying ``self`` then ``other`` to a matrix.

        ``apply_permutation(p.compose(q), Y) == apply_permutation(q, apply_permutation(p, Y))``.
        """
        if len(other) != len(self):
            raise LengthMismatch(f"cannot compose permutations of size {len(self)} and {len(other)}")
        return PermutationMap(self.forward[other.forward])

    def is_identity(self):
        return bool(np.array_equal(self.forward, np.arange(self.forward.size)))


def invert(p: PermutationMap) -> PermutationMap:
    return p.inverse()


def compose(p: PermutationMap, q: PermutationMap) -> PermutationMap:
    return p.compose(q)


def apply_permutation(p, y):
    """Row-permute ``y`` so that row ``i`` of the result is ``y[p[i]]``."""
    m = as_matrix(y)
    f = p.forward if isinstance(p, PermutationMap) else np.asarray(p, dtype=np.int64)
    if f.size != m.shape[0]:
        raise LengthMismatch(f"permutation of size {f.size} applied to {m.shape[0]} rows")
    return m[f]


@dataclass(frozen=True, eq=False)
class SvdFactors:
    """Thin SVD ``A = u @ diag(sigma) @ v.T`` with sigma non-increasing."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self):
        return (self.u * self.sigma) @ self.v.T


def svd_factors(a) -> SvdFactors:
    u, s, vt = np.linalg.svd(np.asarray(a, dtype=np.float64), full_matrices=False)
    return SvdFactors(u, s, vt.T)


@dataclass
class AlignmentRun:
    """Result of an iterative solve, expressed in the caller's coordinates.

    ``x @ w_total.matrix`` approximates ``apply_permutation(p_total, y)``.
    ``objective_trace[k]`` is the nuclear-norm objective after accepted
    iteration ``k``. ``x_final``/``y_final`` are the in-loop matrices at exit.
    """

    w_total: OrthogonalMap
    p_total: PermutationMap
    objective_trace: list
    branch: object = None
    iterations: int = 0
    branch_objectives: dict = field(default_factory=dict)
    x_final: np.ndarray = field(default=None, repr=False)
    y_final: np.ndarray = field(default=None, repr=False)

    @property
    def objective(self):
        return self.objective_trace[-1] if self.objective_trace else float("nan")


MatrixLike = Union[EmbeddingSpace, np.ndarray, Sequence]


def as_matrix(obj) -> np.ndarray:
    if isinstance(obj, EmbeddingSpace):
        return obj.vectors
    if isinstance(obj, OrthogonalMap):
        return obj.matrix
    m = np.asarray(obj, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def check_same_shape(x, y):
    if x.shape != y.shape:
        raise DimensionMismatch(f"shapes differ: {x.shape} vs {y.shape}")


def normalize_rows(space: EmbeddingSpace) -> EmbeddingSpace:
    """Scale every row to unit Euclidean length."""
    m = space.vectors
    norms = np.linalg.norm(m, axis=1)
    bad = np.flatnonzero(norms < ZERO_NORM)
    if bad.size:
        word = space.words[int(bad[0])]
        raise ZeroVector(f"zero vector for word {word!r}", word=word)
    return EmbeddingSpace(space.words, m / norms[:, None], normalized=True)


def normalize_matrix(m):
    m = as_matrix(m)
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    if np.any(norms < ZERO_NORM):
        raise ZeroVector("matrix has a zero row")
    return m / norms


def gram_cross(x, y, dtype=np.float64, block_rows=4096):
    """Matrix of inner products ``G[i, j] = x[i] . y[j]``.

    Computed in row blocks so a 32-bit result does not need a 64-bit
    intermediate of the same size.
    """
    xm, ym = as_matrix(x), as_matrix(y)
    check_same_shape(xm, ym)
    n = xm.shape[0]
    out = np.empty((n, n), dtype=dtype)
    for start in range(0, n, block_rows):
        stop = min(n, start + block_rows)
        out[start:stop] = xm[start:stop] @ ym.T
    return out


def nuclear_norm(a) -> float:
    return float(np.linalg.svd(np.asarray(a, dtype=np.float64), compute_uv=False).sum())


def cross_product(x, p, y):
    """The ``d x d`` matrix ``X^T (P Y)``."""
    xm, ym = as_matrix(x), as_matrix(y)
    check_same_shape(xm, ym)
    return xm.T @ apply_permutation(p, ym)


def nuclear_norm_objective(x, p, y) -> float:
    """``||X^T P Y||_*``; maximizing it over ``p`` solves the joint problem."""
    return nuclear_norm(cross_product(x, p, y))


def frobenius_alignment_cost(x, w, p, y) -> float:
    """``||X W - P Y||_F^2``."""
    xm, ym, wm = as_matrix(x), as_matrix(y), as_matrix(w)
    check_same_shape(xm, ym)
    if wm.shape != (xm.shape[1], xm.shape[1]):
        raise DimensionMismatch(f"map of shape {wm.shape} for dimension {xm.shape[1]}")
    r = xm @ wm - apply_permutation(p, ym)
    return float(np.einsum("ij,ij->", r, r))
