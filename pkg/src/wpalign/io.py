"""Readers and writers for embeddings, dictionaries, maps and translations.

Formats:

* ``.vec``: fastText text format, header ``N d`` then ``token v1 ... vd``;
* dictionaries: one whitespace-separated ``source target`` pair per line;
* maps: header ``d d`` then ``d`` rows of ``d`` reals (17 significant digits);
* translations: ``source<TAB>target`` lines.
"""
from __future__ import annotations

import logging
import math
import warnings

import numpy as np

from .core import EmbeddingSpace, OrthogonalMap, as_matrix
from .errors import (
    CountMismatch,
    DimensionMismatchAtLine,
    EmptyDictionary,
    IoFailure,
    MalformedHeader,
    MalformedLine,
    MalformedMatrix,
    NonFiniteValue,
    NonNumericValue,
    NonOrthogonal,
)
from .evaluate import BilingualDictionary

log = logging.getLogger(__name__)


class DuplicateTokenWarning(UserWarning):
    pass


def _open(path, mode):
    try:
        return open(path, mode, encoding="utf-8", newline="\n" if "w" in mode else None)
    except OSError as exc:
        raise IoFailure(f"{path}: {exc.strerror or exc}") from exc


def _parse_floats(fields, lineno):
    try:
        vals = [float(f) for f in fields]
    except ValueError:
        bad = next(f for f in fields if not _is_float(f))
        raise NonNumericValue(f"non-numeric value {bad!r}", line=lineno) from None
    if not all(math.isfinite(v) for v in vals):
        raise NonFiniteValue("NaN or infinite value", line=lineno)
    return vals


def _is_float(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def load_vec(path, max_words=None) -> EmbeddingSpace:
    """Read the first ``max_words`` entries of a fastText ``.vec`` file.

    Repeated tokens after their first occurrence are skipped with a
    ``DuplicateTokenWarning``; they still count towards ``max_words``
    lines read and towards the header count.
    """
    with _open(path, "r") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise MalformedHeader("expected 'N d'", line=1)
        try:
            n, d = int(header[0]), int(header[1])
        except ValueError:
            raise MalformedHeader(f"non-integer header {' '.join(header)!r}", line=1) from None
        if n < 1 or d < 1:
            raise MalformedHeader(f"header declares N={n}, d={d}", line=1)
        limit = n if max_words is None else min(n, int(max_words))
        words, rows, seen = [], [], set()
        read = 0
        lineno = 1
        for line in fh:
            if read >= limit:
                break
            lineno += 1
            parts = line.rstrip("\n").rstrip("\r").rstrip(" ").split(" ")
            if len(parts) == 1 and not parts[0]:
                raise DimensionMismatchAtLine("empty line", line=lineno)
            if len(parts) != d + 1:
                raise DimensionMismatchAtLine(f"expected {d} values, found {len(parts) - 1}", line=lineno)
            vals = _parse_floats(parts[1:], lineno)
            read += 1
            word = parts[0]
            if word in seen:
                warnings.warn(f"{path}:{lineno}: duplicate token {word!r} skipped", DuplicateTokenWarning, stacklevel=2)
                continue
            seen.add(word)
            words.append(word)
            rows.append(vals)
    if read < limit:
        raise CountMismatch(f"header declares {n} vectors, file has {read}", line=lineno)
    return EmbeddingSpace(words, np.array(rows, dtype=np.float64).reshape(len(rows), d))


def save_vec(path, space: EmbeddingSpace, digits=7):
    fmt = f"%.{digits}g"
    with _open(path, "w") as fh:
        fh.write(f"{space.n} {space.d}\n")
        for word, row in zip(space.words, space.vectors):
            fh.write(word + " " + " ".join(fmt % v for v in row) + "\n")


def load_dictionary(path) -> BilingualDictionary:
    gold = BilingualDictionary()
    with _open(path, "r") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise MalformedLine(f"expected 2 tokens, found {len(parts)}", line=lineno)
            gold.add(parts[0], parts[1])
    if len(gold) == 0:
        raise EmptyDictionary(f"{path}: no dictionary entries")
    return gold


def save_dictionary(path, pairs):
    with _open(path, "w") as fh:
        for s, t in pairs:
            fh.write(f"{s} {t}\n")


def save_map(path, w):
    m = as_matrix(w)
    with _open(path, "w") as fh:
        fh.write(f"{m.shape[0]} {m.shape[1]}\n")
        for row in m:
            fh.write(" ".join("%.17g" % v for v in row) + "\n")


def load_map(path) -> OrthogonalMap:
    """Read a map file and check that the matrix is orthogonal."""
    with _open(path, "r") as fh:
        lines = fh.read().split("\n")
    header = lines[0].split() if lines else []
    if len(header) != 2 or not all(h.isdigit() for h in header) or header[0] != header[1] or int(header[0]) < 1:
        raise MalformedMatrix("expected header 'd d'", line=1)
    d = int(header[0])
    body = [(i + 2, ln.split()) for i, ln in enumerate(lines[1:]) if ln.strip()]
    if len(body) != d:
        raise MalformedMatrix(f"expected {d} rows, found {len(body)}")
    rows = []
    for lineno, parts in body:
        if len(parts) != d:
            raise MalformedMatrix(f"expected {d} values, found {len(parts)}", line=lineno)
        try:
            rows.append(_parse_floats(parts, lineno))
        except (NonNumericValue, NonFiniteValue) as exc:
            raise MalformedMatrix(str(exc.args[0]).split(": ", 1)[-1], line=lineno) from None
    try:
        return OrthogonalMap(np.array(rows))
    except NonOrthogonal as exc:
        raise NonOrthogonal(f"{path}: {exc}") from None


def save_translations(path, pairs):
    with _open(path, "w") as fh:
        for s, t in pairs:
            fh.write(f"{s}\t{t}\n")


def load_translations(path):
    """Pairs from a translations TSV (any whitespace accepted as separator)."""
    out = []
    with _open(path, "r") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                parts = line.split()
            if not line.strip():
                continue
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise MalformedLine("expected 'source<TAB>target'", line=lineno)
            out.append((parts[0], parts[1]))
    return out
