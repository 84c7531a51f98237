"""Timing of the numba kernels against the numpy code paths.

Both engines are called explicitly in one process, so the comparison does not
depend on FLATFOLD_DISABLE_NUMBA.  The first numba call is a warm-up that pays
for compilation (or the on-disk cache load) and is reported separately.

    python benchmarks/bench_numba_vs_numpy.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from flatfold import _accel
from flatfold.coloring import count_colorings
from flatfold.enumeration import enumerate_Z
from flatfold.model import Staggering, random_model, symmetric_defect_weights


def best_of(fn, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _accel.numba_enabled():
        print("numba is disabled or missing; the numba engine runs as plain Python")

    rng = np.random.default_rng(0)
    homogeneous = random_model("square", rng, Staggering.HOMOGENEOUS)
    # the numpy fallback scores every one of the 2^(2MN) masks, so shapes stop at 24 creases
    cases = [
        ("enumerate miura 2x4", lambda e: enumerate_Z(symmetric_defect_weights("miura", 0.5), (2, 4), engine=e).value),
        ("enumerate miura 2x6", lambda e: enumerate_Z(symmetric_defect_weights("miura", 0.5), (2, 6), engine=e).value),
        ("enumerate square 3x4", lambda e, m=homogeneous: enumerate_Z(m, (3, 4), engine=e).value),
        ("enumerate kite 2x6", lambda e, m=random_model("kite", rng): enumerate_Z(m, (2, 6), engine=e).value),
        ("colorings 4x4", lambda e: count_colorings((4, 4), engine=e)[0]),
        ("colorings 5x5", lambda e: count_colorings((5, 5), engine=e)[0]),
    ]
    print(f"{'case':24s} {'warm-up':>10s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}  agree")
    for name, fn in cases:
        t = time.perf_counter()
        fn("numba")
        warm = time.perf_counter() - t
        tn, a = best_of(lambda: fn("numba"), args.repeat)
        tp, b = best_of(lambda: fn("numpy"), args.repeat)
        agree = abs(a - b) <= 1e-12 * abs(b)
        print(f"{name:24s} {warm:10.4f} {tn:10.4f} {tp:10.4f} {tp / tn:8.1f}  {agree}", flush=True)


if __name__ == "__main__":
    main()
