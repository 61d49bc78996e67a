"""Time the numba LAP kernel against the pure-numpy path.

    python3 benchmarks/bench_lap.py --sizes 200 500 1000 2000 --repeat 3
"""
import argparse
import time

import numpy as np

from wpalign import _accel
from wpalign.lap import _solve


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 500, 1000, 2000])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--kind", choices=("gaussian", "gram"), default="gaussian",
                    help="cost matrix: iid gaussian, or negated gram of unit rows (the alignment case)")
    args = ap.parse_args()
    if not _accel.HAS_NUMBA:
        print("numba unavailable (or WPALIGN_DISABLE_NUMBA set): only the numpy path is timed")
    rng = np.random.default_rng(args.seed)
    # compile outside the timed region
    if _accel.HAS_NUMBA:
        _solve(rng.standard_normal((8, 8)), use_numba=True)
    print(f"{'n':>6} {'numpy s':>10} {'numba s':>10} {'speedup':>8}  same")
    for n in args.sizes:
        if args.kind == "gaussian":
            c = rng.standard_normal((n, n))
        else:
            x = rng.standard_normal((n, 50))
            x /= np.linalg.norm(x, axis=1, keepdims=True)
            c = -(x @ x[rng.permutation(n)].T)
        t_np, p_np = best_of(lambda: _solve(c, use_numba=False), args.repeat)
        if _accel.HAS_NUMBA:
            t_nb, p_nb = best_of(lambda: _solve(c, use_numba=True), args.repeat)
            same = np.isclose(c[np.arange(n), p_np].sum(), c[np.arange(n), p_nb].sum())
            print(f"{n:>6} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x  {same}")
        else:
            print(f"{n:>6} {t_np:>10.4f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
