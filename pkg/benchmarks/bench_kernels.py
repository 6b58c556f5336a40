"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from vibstab import _backend, _kernels_py
from vibstab.design import design_vibrations
from vibstab.graph import DirectedGraph, place_controls
from vibstab.instances import random_stabilizable_network
from vibstab.network import build_matrix


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--steps", type=int, default=20000)
    args = ap.parse_args()

    sys = random_stabilizable_network(np.random.default_rng(0), n=args.n, pairs=3)
    M = build_matrix(sys)
    sched = design_vibrations(M, place_controls(DirectedGraph.from_network(sys)).control_set)
    x0 = np.ones(args.n)

    if _backend.BACKEND != "compiled":
        print("compiled extension not built; only the fallback can be timed")
    cases = {
        "transition_average": lambda impl: _backend.transition_average(
            M, sched, 0.0, 0.01, args.steps, window="hann", impl=impl),
        "rk4_trajectory": lambda impl: _backend.rk4_trajectory(
            M, sched, 0.01, x0, 0.0, 1e-5, args.steps, 100, impl=impl),
    }
    print(f"n={args.n}, {len(sched)} vibrated entries, {args.steps} steps, best of {args.repeat}")
    print(f"{'kernel':<20} {'compiled [s]':>13} {'python [s]':>11} {'speedup':>8}")
    for name, run in cases.items():
        slow = best_of(lambda: run(_kernels_py), args.repeat)
        if _backend.BACKEND == "compiled":
            fast = best_of(lambda: run(None), args.repeat)
            print(f"{name:<20} {fast:>13.4f} {slow:>11.4f} {slow / fast:>7.1f}x")
        else:
            print(f"{name:<20} {'-':>13} {slow:>11.4f} {'-':>8}")


if __name__ == "__main__":
    main()
