#!/usr/bin/env python3
"""Time the compiled kernel against the pure-Python loops.

Each case runs the same seeded configuration on both backends, checks that
the results agree, and reports evaluations per second and the speedup.

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --budget 20000 --repeat 3
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time

from rremo import Crossover, Mutation, Rng, gsemo_run, make_problem, nsgaii_run
from rremo import _backend

CASES = [
    # label, problem, n, algo, mutation, crossover, pc, mu
    ("gsemo rrrmo std/onepoint", "rrrmo", 20, "gsemo", "std", "onepoint", 0.5, None),
    ("gsemo rrrmo hyper", "rrrmo", 50, "gsemo", "hyper:0.5", "none", 0.0, None),
    ("gsemo urrrmo std/uniform", "urrrmo", 32, "gsemo", "std", "uniform", 0.5, None),
    ("nsgaii rrrmo std/onepoint", "rrrmo", 20, "nsgaii", "std", "onepoint", 0.5, 46),
    ("nsgaii urrrmo std/uniform", "urrrmo", 32, "nsgaii", "std", "uniform", 0.5, 160),
]


def run_case(case, backend, budget, seed):
    _, problem_name, n, algo, mut, xo, pc, mu = case
    problem = make_problem(problem_name, n)
    mutation, crossover = Mutation(mut, n), Crossover(xo)
    rng = Rng(seed)
    t0 = time.perf_counter()
    if algo == "gsemo":
        res = gsemo_run(problem, mutation, crossover, pc, budget, rng, backend=backend)
    else:
        res = nsgaii_run(problem, mutation, crossover, pc, mu, budget, rng, backend=backend)
    return time.perf_counter() - t0, res


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--budget", type=int, default=20000,
                    help="evaluations per run (small: the Python path is slow)")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)

    if not _backend.available():
        print("compiled extension not built; only the Python path is available", file=sys.stderr)
        return 1

    print(f"{'case':28s} {'python ev/s':>12s} {'compiled ev/s':>14s} {'speedup':>8s}  same")
    for case in CASES:
        times = {"python": [], "compiled": []}
        results = {}
        for backend in ("python", "compiled"):
            for _ in range(args.repeat):
                dt, res = run_case(case, backend, args.budget, args.seed)
                times[backend].append(dt)
                results[backend] = res
        evals = results["python"].evaluations
        py = evals / statistics.median(times["python"])
        cc = evals / statistics.median(times["compiled"])
        same = results["python"].comparable() == results["compiled"].comparable()
        print(f"{case[0]:28s} {py:12.0f} {cc:14.0f} {cc / py:7.1f}x  {'yes' if same else 'NO'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
