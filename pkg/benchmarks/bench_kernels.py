"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py --sizes 64 128 256 512 --repeat 5

Prints one row per (kernel, N) with the best-of-repeat wall time of each
path, the speedup and the max difference between the two results.
"""

import argparse
import time

import numpy as np

from muskat import _kernels as K
from muskat.scenarios import graph


def best_of(fn, repeat):
    fn()  # warm-up (and jit compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256, 512])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--images", type=int, default=32)
    args = ap.parse_args(argv)

    if not K.HAVE_NUMBA:
        print("numba unavailable (or MUSKAT_DISABLE_NUMBA set); only numpy timings shown")

    rng = np.random.default_rng(1)
    print(f"{'kernel':<10} {'N':>5} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8} {'max diff':>10}")
    for n in args.sizes:
        c = graph(n, [0.1, 0.05, 0.02])
        x, y = np.ascontiguousarray(c.z1), np.ascontiguousarray(c.z2)
        g = rng.standard_normal(n)
        cases = {
            "br_sum": (lambda: K._br_sum_numpy(x, y, g, 1)[:2],
                       lambda: K._br_sum_jit(x, y, g, 1)[:2]),
            "br_images": (lambda: K._br_images_numpy(x, y, g, args.images),
                          lambda: K._br_images_jit(x, y, g, args.images)),
            "arc_chord": (lambda: (K._arc_chord_numpy(x, y, 1, 1)[0],),
                          lambda: (K._arc_chord_jit(x, y, 1, 1)[0],)),
        }
        for name, (f_np, f_jit) in cases.items():
            t_np, r_np = best_of(f_np, args.repeat)
            if K.HAVE_NUMBA:
                t_jit, r_jit = best_of(f_jit, args.repeat)
                diff = max(float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
                           for a, b in zip(r_np, r_jit))
                print(f"{name:<10} {n:>5} {1e3 * t_np:>11.3f} {1e3 * t_jit:>11.3f} "
                      f"{t_np / t_jit:>8.1f} {diff:>10.2e}")
            else:
                print(f"{name:<10} {n:>5} {1e3 * t_np:>11.3f} {'-':>11} {'-':>8} {'-':>10}")


if __name__ == "__main__":
    main()
