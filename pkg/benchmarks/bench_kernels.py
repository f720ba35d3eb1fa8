"""Compiled vs numpy backends on the survey kernels.

Both backends draw from the same per-trial streams, so every case also
checks that the two outputs agree row for row.

    python3 benchmarks/bench_kernels.py --count 200
"""

import argparse
import time

import numpy as np

from pdivstats import curves, model
from pdivstats.ffq import field_create


def cases(count):
    F3 = field_create(3)
    return [
        ("model q=3 g=10", lambda b, n: model.model_block(F3, 10, 1, 0, n, True, b)),
        ("hyper q=3 g=10", lambda b, n: curves.hyper_block(F3, 21, 1, 0, n, True, b)),
        ("plane q=3 d=5", lambda b, n: curves.plane_block(F3, 5, 1, 0, n, True, b)),
        ("exhaustive q=3 deg 7",
         lambda b, n: np.array(sorted(curves.hyper_exhaustive(F3, 7, 0, n, True, b).items()),
                               dtype=object)),
    ]


def timed(fn, backend, n, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(backend, n)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=200, help="trials per case for the numpy backend")
    ap.add_argument("--scale", type=int, default=20, help="extra trial factor for the compiled backend")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    print(f"{'case':<24}{'numpy us/trial':>16}{'numba us/trial':>16}{'speedup':>10}  agree")
    for name, fn in cases(args.count):
        fn("numba", 4)  # compile outside the timing
        t_np, out_np = timed(fn, "numpy", args.count, 1)
        n_nb = args.count * args.scale
        t_nb, _ = timed(fn, "numba", n_nb, args.repeat)
        same = np.array_equal(out_np, fn("numba", args.count))
        u_np, u_nb = 1e6 * t_np / args.count, 1e6 * t_nb / n_nb
        print(f"{name:<24}{u_np:>16.1f}{u_nb:>16.2f}{u_np / u_nb:>9.0f}x  {same}")


if __name__ == "__main__":
    main()
