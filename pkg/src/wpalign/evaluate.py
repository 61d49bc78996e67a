"""Dictionary-based evaluation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import PermutationMap
from .errors import EmptyIntersection, InvalidDictionary, LengthMismatch


class BilingualDictionary:
    """Source word -> set of acceptable target words."""

    def __init__(self, entries=None):
        self.entries = {}
        for src, tgts in (entries or {}).items():
            if isinstance(tgts, str):
                tgts = [tgts]
            for t in tgts:
                self.add(src, t)
        for src, tgts in self.entries.items():
            if not tgts:
                raise InvalidDictionary(f"source {src!r} has no targets")

    @classmethod
    def from_pairs(cls, pairs):
        d = cls()
        for s, t in pairs:
            d.add(s, t)
        return d

    def add(self, src, tgt):
        if not src or not tgt:
            raise InvalidDictionary("dictionary entries must be non-empty strings")
        self.entries.setdefault(src, set()).add(tgt)

    def __contains__(self, src):
        return src in self.entries

    def __getitem__(self, src):
        return self.entries[src]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def pairs(self):
        return [(s, t) for s, ts in self.entries.items() for t in sorted(ts)]


@dataclass
class PrecisionResult:
    precision: float
    evaluated: int
    correct: int
    skipped: int
    wrong: list = field(default_factory=list, repr=False)


def precision_at_1_detail(predictions, gold) -> PrecisionResult:
    if not predictions:
        raise EmptyIntersection("no predictions given")
    evaluated = correct = 0
    wrong = []
    for src, tgt in predictions.items():
        if src not in gold:
            continue
        evaluated += 1
        if tgt in gold[src]:
            correct += 1
        else:
            wrong.append(src)
    if evaluated == 0:
        raise EmptyIntersection("no predicted source word appears in the gold dictionary")
    return PrecisionResult(correct / evaluated, evaluated, correct, len(predictions) - evaluated, wrong)


def precision_at_1(predictions, gold) -> float:
    """Fraction of gold-covered predictions whose target is acceptable.

    Sources missing from ``gold`` are left out of the denominator.
    """
    return precision_at_1_detail(predictions, gold).precision


def match_accuracy(p, p_star) -> float:
    a = p.forward if isinstance(p, PermutationMap) else np.asarray(p)
    b = p_star.forward if isinstance(p_star, PermutationMap) else np.asarray(p_star)
    if a.shape != b.shape:
        raise LengthMismatch(f"permutations of size {a.size} and {b.size}")
    if a.size == 0:
        raise LengthMismatch("empty permutations")
    return float(np.mean(a == b))
