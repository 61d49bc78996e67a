"""Alternating Hungarian/Procrustes solvers for ``min ||X W - P Y||_F^2``.

``cih`` alternates a full assignment step and a Procrustes step, keeping an
iterate only while the nuclear-norm objective ``||X^T P Y||_*`` grows.
``ih`` first tries eight starting maps (four SVD-induced variants of the
initial map, each with ``X`` and ``-X``), keeps the best after one step
and continues from it. ``sih`` is ``ih`` with some pairs pinned.
"""
from __future__ import annotations

import enum
import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    AlignmentRun,
    OrthogonalMap,
    PermutationMap,
    as_matrix,
    check_same_shape,
    nuclear_norm,
)
from .errors import DimensionMismatch, DuplicateSeed, InvalidConfig, InvalidSeedIndex, NonOrthogonal, NonOrthogonalInit
from .lap import constrained_match_step, match_step
from .procrustes import procrustes

log = logging.getLogger(__name__)

BRANCH_TIE_TOL = 1e-12


class Variant(enum.Enum):
    I = "I"
    VX = "VX"
    VYT = "VYT"
    VX_VYT = "VX_VYT"


@dataclass(frozen=True)
class BranchId:
    variant: Variant = Variant.I
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def __str__(self):
        return f"{self.variant.value}{'+' if self.sign > 0 else '-'}"

    @classmethod
    def parse(cls, text):
        return cls(Variant(text[:-1]), 1 if text[-1] == "+" else -1)


# tie-break order: all positive-sign variants first
BRANCHES = tuple(BranchId(v, s) for s in (1, -1) for v in Variant)


@dataclass
class SolveConfig:
    max_iterations: int = 50
    min_objective_gain: float = 1e-6
    subsample_size: Optional[int] = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidConfig("max_iterations must be >= 1")
        if self.min_objective_gain < 0:
            raise InvalidConfig("min_objective_gain must be >= 0")
        if self.subsample_size is not None and self.subsample_size < 1:
            raise InvalidConfig("subsample_size must be >= 1 or None")


@dataclass
class SeedConstraints:
    """Pinned ``(source_index, target_index)`` pairs; a partial injection."""

    pinned: list = field(default_factory=list)

    def __post_init__(self):
        self.pinned = [(int(s), int(t)) for s, t in self.pinned]
        src = [s for s, _ in self.pinned]
        tgt = [t for _, t in self.pinned]
        if len(set(src)) != len(src):
            raise DuplicateSeed("a source index is pinned twice")
        if len(set(tgt)) != len(tgt):
            raise DuplicateSeed("a target index is pinned twice")

    def __len__(self):
        return len(self.pinned)

    @property
    def sources(self):
        return np.array([s for s, _ in self.pinned], dtype=np.int64)

    @property
    def targets(self):
        return np.array([t for _, t in self.pinned], dtype=np.int64)

    def validate(self, n):
        for s, t in self.pinned:
            if not (0 <= s < n and 0 <= t < n):
                raise InvalidSeedIndex(f"seed pair ({s}, {t}) outside 0..{n - 1}")


def _check_init(w0, d):
    if not isinstance(w0, OrthogonalMap):
        try:
            w0 = OrthogonalMap(as_matrix(w0))
        except NonOrthogonal as exc:
            raise NonOrthogonalInit(str(exc)) from exc
    if w0.d != d:
        raise DimensionMismatch(f"initial map is {w0.d}x{w0.d}, embeddings have d={d}")
    return w0.matrix


def _prepare(x, y, cfg):
    xm, ym = as_matrix(x), as_matrix(y)
    check_same_shape(xm, ym)
    if cfg.subsample_size is not None and cfg.subsample_size < xm.shape[0]:
        k = cfg.subsample_size
        xm, ym = xm[:k], ym[:k]
    return xm, ym


class _Iterate:
    """In-loop state of one branch: ``X_k = X W_acc`` and ``Y_k = Y[q]``."""

    def __init__(self, x, y, w_init, pins=None):
        self.x, self.y = x, y
        self.w_acc = np.array(w_init, dtype=np.float64)
        self.xk = x @ self.w_acc
        self.q = np.arange(x.shape[0], dtype=np.int64)
        self.yk = y
        self.pins = pins
        self.trace = []

    def _assign(self):
        if self.pins is None or len(self.pins) == 0:
            return match_step(self.xk, self.yk).forward
        # pinned targets are tracked through the current row order of Y_k
        qinv = np.empty_like(self.q)
        qinv[self.q] = np.arange(self.q.size)
        return constrained_match_step(self.xk, self.yk, self.pins.sources, qinv[self.pins.targets]).forward

    def step(self, min_gain):
        """One assignment + Procrustes step; returns True if accepted."""
        p = self._assign()
        y_new = self.yk[p]
        w = procrustes(self.xk, y_new).matrix
        obj = nuclear_norm(self.xk.T @ y_new)
        if self.trace:
            prev = self.trace[-1]
            if not (obj > prev and obj - prev >= min_gain * abs(prev)):
                return False
        self.xk = self.xk @ w
        self.yk = y_new
        self.q = self.q[p]
        self.w_acc = self.w_acc @ w
        self.trace.append(obj)
        return True

    def run(self, cfg):
        while len(self.trace) < cfg.max_iterations:
            if not self.step(cfg.min_objective_gain):
                break
        return self

    def result(self, branch, branch_objectives=None):
        return AlignmentRun(
            w_total=OrthogonalMap(self.w_acc, tol=1e-5),
            p_total=PermutationMap(self.q),
            objective_trace=list(self.trace),
            branch=branch,
            iterations=len(self.trace),
            branch_objectives=dict(branch_objectives or {}),
            x_final=self.xk,
            y_final=self.yk,
        )


def cih(x, y, w0=None, cfg=None, _pins=None) -> AlignmentRun:
    """Cut Iterative Hungarian from the single start ``X W0``.

    The first step is always kept; later steps need a relative objective
    gain of at least ``cfg.min_objective_gain``. With a subsample only the
    first ``subsample_size`` rows are iterated on and ``p_total`` covers
    those rows.
    """
    cfg = cfg or SolveConfig()
    xm, ym = _prepare(x, y, cfg)
    w0m = _check_init(np.eye(xm.shape[1]) if w0 is None else w0, xm.shape[1])
    it = _Iterate(xm, ym, w0m, _pins).run(cfg)
    return it.result(BranchId(Variant.I, 1))


def natural_initializations(x, y, w0):
    """The four starting maps ``W0, V_X W0, W0 V_Y^T, V_X W0 V_Y^T``.

    ``V_X, V_Y`` are the right singular vectors of ``X`` and ``Y``.
    """
    xm, ym = as_matrix(x), as_matrix(y)
    w0m = as_matrix(w0)
    vx = np.linalg.svd(xm, full_matrices=False)[2].T
    vy = np.linalg.svd(ym, full_matrices=False)[2].T
    return {
        Variant.I: w0m,
        Variant.VX: vx @ w0m,
        Variant.VYT: w0m @ vy.T,
        Variant.VX_VYT: vx @ w0m @ vy.T,
    }


def _ih(xm, ym, w0m, cfg, pins=None):
    inits = natural_initializations(xm, ym, w0m)
    best, best_obj, scores = None, -np.inf, {}
    for b in BRANCHES:
        trial = _Iterate(xm, ym, b.sign * inits[b.variant], pins)
        trial.step(cfg.min_objective_gain)
        obj = trial.trace[0]
        scores[b] = obj
        if obj > best_obj + BRANCH_TIE_TOL:
            best, best_obj = (b, trial), obj
    branch, it = best
    log.debug("branch %s selected (objective %.6g)", branch, best_obj)
    it.run(cfg)
    return it.result(branch, scores)


def ih(x, y, w0=None, cfg=None) -> AlignmentRun:
    """Iterative Hungarian: pick the best of eight starts, then run CIH on it.

    The branch is chosen once, after one step on each start. All returned
    quantities are in the original coordinates of ``x`` and ``y``.
    """
    cfg = cfg or SolveConfig()
    xm, ym = _prepare(x, y, cfg)
    w0m = _check_init(np.eye(xm.shape[1]) if w0 is None else w0, xm.shape[1])
    return _ih(xm, ym, w0m, cfg)


def sih(x, y, seeds, cfg=None) -> AlignmentRun:
    """Supervised IH: ``W0`` from Procrustes on the seed pairs, pins held fixed.

    Pinned sources keep their targets in every assignment step; each
    Procrustes step uses all rows. Seeds outside the subsample still shape
    ``W0`` but are not pinned during the iteration.
    """
    cfg = cfg or SolveConfig()
    if not isinstance(seeds, SeedConstraints):
        seeds = SeedConstraints(seeds)
    xfull, yfull = as_matrix(x), as_matrix(y)
    check_same_shape(xfull, yfull)
    seeds.validate(xfull.shape[0])
    if len(seeds) == 0:
        raise InvalidSeedIndex("at least one seed pair is required")
    d = xfull.shape[1]
    if len(seeds) < d:
        warnings.warn(f"only {len(seeds)} seed pairs for dimension {d}; initial map is underdetermined", stacklevel=2)
    w0 = procrustes(xfull[seeds.sources], yfull[seeds.targets]).matrix
    xm, ym = _prepare(xfull, yfull, cfg)
    n = xm.shape[0]
    inside = [(s, t) for s, t in seeds.pinned if s < n and t < n]
    return _ih(xm, ym, w0, cfg, SeedConstraints(inside))


def branch_distance_report(x, y, w_star) -> dict:
    """Distance from each natural start (with ``W0 = I``) to its own optimum.

    The matching is the one induced by ``w_star``. For each of the four
    positive-sign variants the coordinates are changed to
    ``X V_X`` and/or ``Y V_Y``; the Procrustes optimum ``W_b`` in those
    coordinates is compared against the identity start: ``||I - W_b||_F``.
    """
    xm, ym = as_matrix(x), as_matrix(y)
    check_same_shape(xm, ym)
    ws = as_matrix(w_star)
    if ws.shape != (xm.shape[1], xm.shape[1]):
        raise DimensionMismatch(f"w_star of shape {ws.shape} for dimension {xm.shape[1]}")
    p = match_step(xm @ ws, ym)
    ym = ym[p.forward]
    vx = np.linalg.svd(xm, full_matrices=False)[2].T
    vy = np.linalg.svd(ym, full_matrices=False)[2].T
    eye = np.eye(xm.shape[1])
    coords = {
        Variant.I: (xm, ym),
        Variant.VX: (xm @ vx, ym),
        Variant.VYT: (xm, ym @ vy),
        Variant.VX_VYT: (xm @ vx, ym @ vy),
    }
    return {v: float(np.linalg.norm(eye - procrustes(a, b).matrix)) for v, (a, b) in coords.items()}
