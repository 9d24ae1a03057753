"""Time the numba and numpy kernel families on experiment-sized inputs.

    python benchmarks/bench_kernels.py [--reps 10000] [--length 101] [--repeat 5]
"""

import argparse
import time

import numpy as np

from prequential import kernels

P = (0.0, 0.5, 1.0)
Q = (0.0, 0.1, 4.0)


def best_of(func, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        func()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--reps", type=int, default=10_000)
    parser.add_argument("--length", type=int, default=101)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    z = np.random.default_rng(0).standard_normal((args.reps, args.length))
    families = [kernels.numpy_kernels]
    if kernels.numba_kernels is not None:
        families.append(kernels.numba_kernels)
    else:
        print("numba not installed; timing the numpy family only")

    print(f"{args.reps} paths x {args.length} steps, best of {args.repeat}")
    print(f"{'backend':8s} {'ar1_paths':>12s} {'cumulative':>12s} {'delta_steps':>12s}")
    reference = None
    for fam in families:
        xs = fam.ar1_paths(z, *P)  # first call compiles under numba
        fam.cumulative_deltas(xs, *P, *Q)
        fam.delta_steps(xs[0], *P, *Q)
        t_sim = best_of(lambda: fam.ar1_paths(z, *P), args.repeat)
        t_cum = best_of(lambda: fam.cumulative_deltas(xs, *P, *Q), args.repeat)
        t_step = best_of(lambda: [fam.delta_steps(xs[r], *P, *Q) for r in range(100)], args.repeat)
        print(f"{fam.name:8s} {t_sim * 1e3:10.2f}ms {t_cum * 1e3:10.2f}ms {t_step * 1e3:10.2f}ms")
        c_log, _ = fam.cumulative_deltas(xs, *P, *Q)
        if reference is None:
            reference = c_log
        else:
            print(f"max |numba - numpy| cumulative log delta: {np.max(np.abs(c_log - reference)):.2e}")


if __name__ == "__main__":
    main()
