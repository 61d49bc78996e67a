"""Orthogonal Procrustes."""
from __future__ import annotations

import logging

import numpy as np
from scipy.linalg import expm

from .core import OrthogonalMap, as_matrix, check_same_shape
from .errors import DimensionMismatch

log = logging.getLogger(__name__)

RANK_TOL = 1e-10


def procrustes(x, y_matched) -> OrthogonalMap:
    """Orthogonal ``W`` minimizing ``||X W - Y||_F`` for row-matched ``X, Y``.

    ``W = U V^T`` where ``U S V^T`` is the SVD of ``X^T Y``. A singular
    ``X^T Y`` still yields a valid minimizer; the result is then flagged
    ``rank_deficient``.
    """
    xm, ym = as_matrix(x), as_matrix(y_matched)
    check_same_shape(xm, ym)
    u, s, vt = np.linalg.svd(xm.T @ ym)
    deficient = bool(s.size and s[-1] <= RANK_TOL * max(s[0], np.finfo(float).tiny))
    if deficient:
        log.debug("X^T Y is rank deficient (sigma_min/sigma_max = %.3g)", s[-1] / s[0] if s[0] else 0.0)
    return OrthogonalMap(u @ vt, rank_deficient=deficient)


def random_orthogonal(d, rng):
    """Haar-distributed orthogonal matrix (QR of a Gaussian, sign-fixed)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def perturbation_candidates(w, trials, seed=0, scales=None):
    """Random orthogonal matrices around ``w``.

    Mostly ``w @ expm(t A)`` for random skew ``A`` over a spread of step
    sizes ``t``; every 50th candidate is a Haar sample.
    """
    wm = as_matrix(w)
    d = wm.shape[0]
    rng = np.random.default_rng(seed)
    scales = np.atleast_1d(np.geomspace(1e-4, 1.0, 9) if scales is None else scales)
    for t in range(trials):
        if d == 1:
            yield -wm if t % 2 else wm.copy()
        elif t % 50 == 49:
            yield random_orthogonal(d, rng)
        else:
            a = rng.standard_normal((d, d))
            a = (a - a.T) / np.sqrt(2 * d)
            yield wm @ expm(scales[t % scales.size] * a)


def optimality_gap(x, y_matched, w, trials=1000, seed=0, scales=None):
    """``min_Q ||X Q - Y||^2 - ||X W - Y||^2`` over ``perturbation_candidates``.

    A true minimizer gives a non-negative gap.
    """
    xm, ym, wm = as_matrix(x), as_matrix(y_matched), as_matrix(w)
    check_same_shape(xm, ym)
    d = xm.shape[1]
    if wm.shape != (d, d):
        raise DimensionMismatch(f"map of shape {wm.shape} for dimension {d}")
    base = np.sum((xm @ wm - ym) ** 2)
    best = np.inf
    for q in perturbation_candidates(wm, trials, seed, scales):
        best = min(best, np.sum((xm @ q - ym) ** 2) - base)
    return float(best)
