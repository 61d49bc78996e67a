"""Command line entry point: ``wpalign <command> ...``.

Errors are reported as one line on stderr, ``error: <Code>: <message>``,
with exit status 1. ``WPALIGN_NUM_THREADS`` caps the numba/BLAS thread pools.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io
from ._accel import set_num_threads
from .core import OrthogonalMap, normalize_rows, nuclear_norm_objective
from .errors import InvalidK, NoResolvableSeeds, WPError
from .evaluate import precision_at_1_detail
from .lap import match_step
from .retrieval import CslsConfig, csls_translate, nn_translate
from .synth import SynthSpec, generate, run_experiment
from .wp import SeedConstraints, SolveConfig, cih, ih, sih

log = logging.getLogger("wpalign")


def _solve_config(args):
    return SolveConfig(
        max_iterations=args.max_iter,
        min_objective_gain=args.tol,
        subsample_size=args.subsample,
        rng_seed=args.seed,
    )


def _load_pair(args):
    x = io.load_vec(args.src, args.max_words)
    y = io.load_vec(args.tgt, args.max_words)
    if not args.no_normalize:
        x, y = normalize_rows(x), normalize_rows(y)
    return x, y


def _square(x, y):
    n = min(len(x), len(y))
    if len(x) != len(y):
        log.info("using the first %d words of each vocabulary", n)
    return x.head(n), y.head(n)


def _write_outputs(out_dir, x, y, run, extra=None):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.save_map(out / "map.txt", run.w_total)
    pairs = [(x.words[i], y.words[j]) for i, j in enumerate(run.p_total.forward)]
    io.save_translations(out / "translations.tsv", pairs)
    identity = float(np.mean([s == t for s, t in pairs]))
    fields = {
        "n": len(pairs),
        "d": x.d,
        "iterations": run.iterations,
        "branch": str(run.branch),
        "objective": f"{run.objective:.10g}",
        "accuracy": f"{identity:.6f}",
    }
    fields.update(extra or {})
    lines = [
        f"words        {len(pairs)} of {len(x)} (d={x.d})",
        f"branch       {run.branch}",
        f"iterations   {run.iterations}",
        "objective    " + " ".join(f"{v:.10g}" for v in run.objective_trace),
        f"token-identity accuracy {100 * identity:.2f}%",
        " ".join(f"{k}={v}" for k, v in fields.items()),
    ]
    text = "\n".join(lines) + "\n"
    (out / "report.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def _load_init(spec, d):
    if spec in (None, "identity"):
        return OrthogonalMap.identity(d)
    return io.load_map(spec)


def cmd_align(args):
    x, y = _load_pair(args)
    xs, ys = _square(x, y)
    cfg = _solve_config(args)
    w0 = _load_init(args.init, x.d)
    solver = ih if args.mode == "ih" else cih
    run = solver(xs, ys, w0, cfg)
    extra = {}
    if args.report_baseline:
        k = len(run.p_total)
        x0 = xs.vectors[:k] @ w0.matrix
        p0 = match_step(x0, ys.vectors[:k])
        # <X W0, P0 Y>_F: the objective reached by the initial map without refinement
        extra["baseline_objective"] = f"{float(np.sum(x0 * ys.vectors[:k][p0.forward])):.10g}"
        extra["baseline_nuclear"] = f"{nuclear_norm_objective(xs.vectors[:k], p0, ys.vectors[:k]):.10g}"
        same = [xs.words[i] == ys.words[j] for i, j in enumerate(p0.forward)]
        extra["baseline_accuracy"] = f"{float(np.mean(same)):.6f}"
    _write_outputs(args.out_dir, xs, ys, run, extra)
    return 0


def cmd_supervised(args):
    x, y = _load_pair(args)
    xs, ys = _square(x, y)
    gold = io.load_dictionary(args.seed_dict)
    n = len(xs) if args.subsample is None else min(len(xs), args.subsample)
    xi, yi = xs.index(), ys.index()
    pins, used_s, used_t = [], set(), set()
    skipped = 0
    for s, t in gold.pairs():
        i, j = xi.get(s), yi.get(t)
        if i is None or j is None or i in used_s or j in used_t:
            skipped += 1
            continue
        pins.append((i, j))
        used_s.add(i)
        used_t.add(j)
    if skipped:
        warnings.warn(f"{skipped} seed pairs not resolvable or not injective; skipped")
    if not any(i < n and j < n for i, j in pins):
        raise NoResolvableSeeds(f"none of the {len(gold.pairs())} seed pairs resolve in both vocabularies")
    run = sih(xs, ys, SeedConstraints(pins), _solve_config(args))
    _write_outputs(args.out_dir, xs, ys, run, {"seeds": len(pins)})
    return 0


def cmd_translate(args):
    if args.k < 1:
        raise InvalidK(f"k must be >= 1, got {args.k}")
    x, y = _load_pair(args)
    w = io.load_map(args.map)
    if args.retrieval == "csls":
        idx = csls_translate(x, w, y, CslsConfig(args.k))
    else:
        idx = nn_translate(x, w, y)
    pairs = [(x.words[i], y.words[j]) for i, j in enumerate(idx)]
    if args.output in (None, "-"):
        sys.stdout.write("".join(f"{s}\t{t}\n" for s, t in pairs))
    else:
        io.save_translations(args.output, pairs)
    return 0


def cmd_evaluate(args):
    pairs = io.load_translations(args.translations)
    gold = io.load_dictionary(args.gold)
    predictions = {}
    for s, t in pairs:
        predictions.setdefault(s, t)
    res = precision_at_1_detail(predictions, gold)
    print(f"precision@1 {res.precision:.3f}")
    print(f"precision={res.precision:.6f} evaluated={res.evaluated} correct={res.correct} skipped={res.skipped}")
    return 0


def cmd_synth(args):
    pert = args.perturbation if args.perturbation == "random" else float(args.perturbation)
    spec = SynthSpec(n=args.n, d=args.d, noise_sigma=args.noise, w_perturbation=pert,
                     permute=not args.no_permute, rng_seed=args.seed)
    x, y, p, w = generate(spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.save_vec(out / "src.vec", x, digits=args.digits)
    io.save_vec(out / "tgt.vec", y, digits=args.digits)
    io.save_translations(out / "p_star.tsv", [(x.words[i], y.words[j]) for i, j in enumerate(p.forward)])
    io.save_map(out / "w_star.txt", w)
    print(f"wrote {out}/src.vec {out}/tgt.vec {out}/p_star.tsv {out}/w_star.txt")
    return 0


def cmd_experiment(args):
    cfg = SolveConfig(max_iterations=args.max_iter, min_objective_gain=args.tol, rng_seed=args.seed)
    rep = run_experiment(args.src, args.tgt, args.mode, args.seed_fraction, cfg, args.vocabulary, args.max_words)
    text = rep.text() + "\n"
    sys.stdout.write(text)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(text, encoding="utf-8")
        io.save_translations(out / "translations.tsv", rep.translations)
    return 0


def _solver_flags(p):
    p.add_argument("--subsample", type=int, default=None, metavar="K",
                   help="iterate on the first K words only (default: all; 45000 was used for 200k-word vocabularies)")
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-6, help="minimum relative objective gain per iteration")
    p.add_argument("--seed", type=int, default=0)


def _input_flags(p):
    p.add_argument("src", help="source embeddings (.vec)")
    p.add_argument("tgt", help="target embeddings (.vec)")
    p.add_argument("--max-words", type=int, default=None, help="read at most this many words per file")
    p.add_argument("--no-normalize", action="store_true", help="skip unit-length normalization")


def _one_line(exc):
    return " ".join(str(exc).split())


def build_parser():
    parser = argparse.ArgumentParser(prog="wpalign", description="Wasserstein-Procrustes alignment of embedding spaces")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", help="unsupervised alignment (CIH or IH)")
    _input_flags(p)
    p.add_argument("--mode", choices=("cih", "ih"), default="ih")
    p.add_argument("--init", default="identity", help="initial map file, or 'identity'")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--report-baseline", action="store_true",
                   help="also report objective and accuracy of the initial map's own matching")
    _solver_flags(p)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("supervised", help="alignment with pinned seed pairs (SIH)")
    _input_flags(p)
    p.add_argument("seed_dict", help="seed dictionary, one 'source target' pair per line")
    p.add_argument("--out-dir", default=".")
    _solver_flags(p)
    p.set_defaults(func=cmd_supervised)

    p = sub.add_parser("translate", help="retrieve translations with a given map")
    _input_flags(p)
    p.add_argument("map", help="map file")
    p.add_argument("--retrieval", choices=("nn", "csls"), default="csls")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("-o", "--output", default=None, help="translations TSV (default: stdout)")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("evaluate", help="precision@1 of translations against a gold dictionary")
    p.add_argument("translations")
    p.add_argument("gold")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="write a synthetic pair of embedding files")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--d", type=int, default=50)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--perturbation", default="0", help="distance of W* from I, or 'random'")
    p.add_argument("--no-permute", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--digits", type=int, default=9, help="significant digits in .vec output")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("experiment", help="self-alignment experiment scored by shared tokens")
    p.add_argument("src")
    p.add_argument("tgt")
    p.add_argument("--mode", choices=("hungarian", "cih", "ih", "sih"), default="ih")
    p.add_argument("--seed-fraction", type=float, default=0.05)
    p.add_argument("--vocabulary", type=int, default=10000)
    p.add_argument("--max-words", type=int, default=None)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(name)s: %(message)s")
    threads = os.environ.get("WPALIGN_NUM_THREADS")
    limiter = set_num_threads(int(threads)) if threads else None
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except WPError as exc:
        print(f"error: {exc.code}: {_one_line(exc)}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {_one_line(exc)}", file=sys.stderr)
        return 1
    finally:
        if limiter is not None:
            limiter.restore_original_limits()


if __name__ == "__main__":
    sys.exit(main())
