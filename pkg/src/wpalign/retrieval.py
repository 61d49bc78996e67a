"""Translation retrieval: nearest neighbour and CSLS.

Both work on cosine similarity between the mapped sources ``X W`` and the
targets ``Y``; rows are unit-normalized internally. Ties go to the lowest
target index.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_matrix, normalize_matrix
from .errors import DimensionMismatch, InvalidK

BLOCK = 4096


@dataclass(frozen=True)
class CslsConfig:
    k: int = 10

    def check(self, n_targets, n_sources):
        limit = min(n_targets, n_sources)
        if not (1 <= self.k <= max(limit - 1, 1)):
            raise InvalidK(f"k={self.k} outside 1..{max(limit - 1, 1)}")


def _mapped(x, w, y):
    xm, ym, wm = as_matrix(x), as_matrix(y), as_matrix(w)
    if xm.shape[1] != ym.shape[1] or wm.shape != (xm.shape[1], xm.shape[1]):
        raise DimensionMismatch(f"x {xm.shape}, w {wm.shape}, y {ym.shape} are incompatible")
    return normalize_matrix(xm @ wm), normalize_matrix(ym)


def topk_mean(a, b, k, block=BLOCK):
    """For each row of ``a``: mean of its ``k`` largest similarities to ``b``."""
    out = np.empty(a.shape[0])
    for start in range(0, a.shape[0], block):
        sims = a[start:start + block] @ b.T
        if k < sims.shape[1]:
            sims = np.partition(sims, sims.shape[1] - k, axis=1)[:, -k:]
        out[start:start + block] = sims.mean(axis=1)
    return out


def csls_scores(x, w, y, k=10):
    """Full ``N_s x N_t`` matrix of CSLS scores (for small problems and tests)."""
    xs, yt = _mapped(x, w, y)
    CslsConfig(k).check(yt.shape[0], xs.shape[0])
    mu_t = topk_mean(xs, yt, k)
    mu_s = topk_mean(yt, xs, k)
    return 2 * (xs @ yt.T) - mu_t[:, None] - mu_s[None, :]


def csls_translate(x, w, y, cfg=None, block=BLOCK):
    """Target index maximizing ``2 cos - mu_T(source) - mu_S(target)`` per source."""
    cfg = cfg or CslsConfig()
    if not isinstance(cfg, CslsConfig):
        cfg = CslsConfig(int(cfg))
    xs, yt = _mapped(x, w, y)
    cfg.check(yt.shape[0], xs.shape[0])
    mu_s = topk_mean(yt, xs, cfg.k, block)
    out = np.empty(xs.shape[0], dtype=np.int64)
    for start in range(0, xs.shape[0], block):
        # mu_T is constant along a source row, so it does not move the argmax
        scores = 2 * (xs[start:start + block] @ yt.T) - mu_s[None, :]
        out[start:start + block] = np.argmax(scores, axis=1)
    return out


def nn_translate(x, w, y, block=BLOCK):
    """Target index with the highest cosine per source."""
    xs, yt = _mapped(x, w, y)
    out = np.empty(xs.shape[0], dtype=np.int64)
    for start in range(0, xs.shape[0], block):
        out[start:start + block] = np.argmax(xs[start:start + block] @ yt.T, axis=1)
    return out


def translate(x, w, y, method="csls", k=10):
    if method == "csls":
        return csls_translate(x, w, y, CslsConfig(k))
    if method == "nn":
        return nn_translate(x, w, y)
    raise ValueError(f"unknown retrieval method {method!r}")
