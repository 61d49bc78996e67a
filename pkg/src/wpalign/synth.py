"""Synthetic alignment problems and the two-file experiment harness."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq

from .core import EmbeddingSpace, OrthogonalMap, PermutationMap, normalize_matrix, normalize_rows
from .errors import InsufficientSharedVocabulary, InvalidSpec
from .evaluate import match_accuracy
from .procrustes import random_orthogonal
from .retrieval import CslsConfig, csls_translate
from .wp import SolveConfig, cih, ih, sih

DEFAULT_VOCABULARY = 10000
ALIGNED_THRESHOLD = 0.9


@dataclass
class SynthSpec:
    n: int = 1000
    d: int = 50
    noise_sigma: float = 0.0
    w_perturbation: Union[float, str] = 0.0
    permute: bool = True
    rng_seed: int = 0

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and isinstance(self.d, (int, np.integer))):
            raise InvalidSpec("n and d must be integers")
        if not self.n >= self.d >= 1:
            raise InvalidSpec(f"need n >= d >= 1, got n={self.n}, d={self.d}")
        if not self.noise_sigma >= 0:
            raise InvalidSpec("noise_sigma must be >= 0")
        if isinstance(self.w_perturbation, str):
            if self.w_perturbation != "random":
                raise InvalidSpec("w_perturbation must be a number >= 0 or 'random'")
        elif not self.w_perturbation >= 0:
            raise InvalidSpec("w_perturbation must be >= 0")


def perturbed_identity(d, distance, rng):
    """Rotation ``expm(t A)``, ``A`` random skew, with ``||R - I||_F = distance``."""
    if distance == 0 or d == 1:
        if distance:
            raise InvalidSpec("no rotation other than the identity exists for d = 1")
        return np.eye(d)
    a = rng.standard_normal((d, d))
    a = a - a.T
    a /= np.linalg.norm(a)
    eye = np.eye(d)

    def gap(t):
        return np.linalg.norm(expm(t * a) - eye) - distance

    # ||expm(tA) - I|| rises monotonically until the largest rotation angle hits pi
    theta = np.abs(np.linalg.eigvals(a).imag).max()
    t_max = np.pi / theta
    if gap(t_max) < 0:
        raise InvalidSpec(f"w_perturbation {distance} too large for this rotation generator")
    return expm(brentq(gap, 0.0, t_max, xtol=1e-14) * a)


def generate(spec: SynthSpec):
    """Return ``(x, y, p_star, w_star)``.

    ``X`` has unit-normalized Gaussian rows; ``Z = normalize(X W* + noise)``;
    ``Y`` is ``Z`` with rows reordered so that row ``i`` of ``X`` matches row
    ``p_star[i]`` of ``Y``. Target words carry the label of their source.
    """
    rng = np.random.default_rng(spec.rng_seed)
    x = normalize_matrix(rng.standard_normal((spec.n, spec.d)))
    if spec.w_perturbation == "random":
        w = random_orthogonal(spec.d, rng)
    else:
        w = perturbed_identity(spec.d, float(spec.w_perturbation), rng)
    z = x @ w
    if spec.noise_sigma > 0:
        z = z + spec.noise_sigma * rng.standard_normal(z.shape)
    z = normalize_matrix(z)
    p = rng.permutation(spec.n) if spec.permute else np.arange(spec.n)
    y = np.empty_like(z)
    y[p] = z
    xs = EmbeddingSpace.from_matrix(x, normalized=True)
    words = [None] * spec.n
    for i, j in enumerate(p):
        words[j] = xs.words[i]
    ys = EmbeddingSpace(words, y, normalized=True)
    return xs, ys, PermutationMap(p), OrthogonalMap(w)


def shared_vocabulary(x: EmbeddingSpace, y: EmbeddingSpace, limit=DEFAULT_VOCABULARY):
    """Restrict both spaces to the first ``limit`` tokens of ``x`` present in ``y``.

    Returns ``(x_sub, y_sub, p_star)`` with ``y_sub`` kept in ``y``'s file
    order and ``p_star`` the token-identity correspondence.
    """
    yidx = y.index()
    src = [i for i, w in enumerate(x.words) if w in yidx]
    if limit is not None:
        src = src[:limit]
    tgt = sorted(yidx[x.words[i]] for i in src)
    xs, ys = x.subset(src), y.subset(tgt)
    pos = ys.index()
    p = PermutationMap(np.array([pos[w] for w in xs.words], dtype=np.int64))
    return xs, ys, p


@dataclass
class ExperimentReport:
    mode: str
    n: int
    d: int
    accuracy: float
    csls_accuracy: float
    iterations: int
    objective_trace: list
    branch: str
    seeds: int = 0
    translations: list = field(default_factory=list, repr=False)

    @property
    def status(self):
        return "aligned" if self.accuracy >= ALIGNED_THRESHOLD else "failed"

    def record(self):
        obj = self.objective_trace[-1] if self.objective_trace else float("nan")
        fields = dict(
            mode=self.mode, n=self.n, d=self.d, seeds=self.seeds,
            accuracy=f"{self.accuracy:.6f}", csls_accuracy=f"{self.csls_accuracy:.6f}",
            iterations=self.iterations, objective=f"{obj:.10g}", branch=self.branch, status=self.status,
        )
        return " ".join(f"{k}={v}" for k, v in fields.items())

    def text(self):
        return "\n".join([
            f"mode            {self.mode}",
            f"words           {self.n} (d={self.d})",
            f"seed pairs      {self.seeds}",
            f"branch          {self.branch}",
            f"iterations      {self.iterations}",
            f"objective trace {' '.join(f'{v:.6g}' for v in self.objective_trace)}",
            f"match accuracy  {100 * self.accuracy:.2f}%  (assignment vs shared-token truth)",
            f"csls accuracy   {100 * self.csls_accuracy:.2f}%  (CSLS k=10 retrieval vs shared-token truth)",
            f"status          {self.status}",
            self.record(),
        ])


def run_spaces(x, y, mode="ih", seed_fraction=0.05, cfg=None, vocabulary=DEFAULT_VOCABULARY, k=10, normalize=True):
    """Align two spaces that share tokens and score against token identity.

    ``vocabulary`` bounds the problem size; ``cfg.subsample_size`` is ignored.
    """
    cfg = replace(cfg or SolveConfig(), subsample_size=None)
    if normalize:
        x, y = normalize_rows(x), normalize_rows(y)
    xs, ys, p_star = shared_vocabulary(x, y, vocabulary)
    if len(xs) < 2 * x.d:
        raise InsufficientSharedVocabulary(f"{len(xs)} shared tokens, need at least {2 * x.d}")
    seeds = 0
    if mode == "hungarian":
        run = cih(xs, ys, None, SolveConfig(max_iterations=1, min_objective_gain=cfg.min_objective_gain))
    elif mode == "cih":
        run = cih(xs, ys, None, cfg)
    elif mode == "ih":
        run = ih(xs, ys, None, cfg)
    elif mode == "sih":
        rng = np.random.default_rng(cfg.rng_seed)
        n_seeds = max(1, int(round(seed_fraction * len(xs))))
        chosen = np.sort(rng.choice(len(xs), size=n_seeds, replace=False))
        seeds = n_seeds
        run = sih(xs, ys, [(int(i), int(p_star[i])) for i in chosen], cfg)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    acc = match_accuracy(run.p_total, p_star)
    csls = csls_translate(xs, run.w_total, ys, CslsConfig(min(k, len(xs) - 1)))
    csls_acc = float(np.mean(csls == p_star.forward))
    pairs = [(xs.words[i], ys.words[j]) for i, j in enumerate(run.p_total.forward)]
    return ExperimentReport(
        mode=mode, n=len(xs), d=x.d, accuracy=acc, csls_accuracy=csls_acc, iterations=run.iterations,
        objective_trace=run.objective_trace, branch=str(run.branch), seeds=seeds, translations=pairs,
    )


def run_experiment(x_path, y_path, mode="ih", seed_fraction=0.05, cfg=None, vocabulary=DEFAULT_VOCABULARY, max_words=None):
    from .io import load_vec

    x = load_vec(x_path, max_words)
    y = load_vec(y_path, max_words)
    return run_spaces(x, y, mode, seed_fraction, cfg, vocabulary)


def experiment_accuracy_from_table(pairs):
    """Token-identity accuracy recomputed from an emitted translation table."""
    return float(np.mean([s == t for s, t in pairs])) if pairs else float("nan")
