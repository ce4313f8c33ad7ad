"""Time the compiled kernels against the numpy fallback on identical inputs.

    python3 benchmarks/bench_kernels.py [--n 1000] [--repeat 3]

Both implementations receive the same arrays, and the script checks that
their outputs agree before it reports timings.
"""

import argparse
import time

import numpy as np

from hyqubo import QuboProblem, _kernels_py, evaluate, init_deltas
from hyqubo.ising import beta_range, build_subqubo

try:
    from hyqubo import _kernels as compiled
except ImportError:
    compiled = None


def random_problem(rng, n, density=0.1):
    upper = np.triu(rng.integers(-100, 101, (n, n)) * (rng.random((n, n)) < density))
    return QuboProblem(upper + np.triu(upper, 1).T)


def best_of(fn, repeat):
    times, result = [], None
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t)
    return min(times), result


def tabu_case(p, x0, alpha, tenure):
    def run(mod):
        x = x0.copy()
        counts = np.zeros(p.n, dtype=np.int64)
        x_min = x.copy()
        moves = np.empty(alpha, dtype=np.int64)
        ov_min, obj = mod.tabu_kernel(p.Q, x, init_deltas(p, x), evaluate(p, x), alpha, tenure,
                                      counts, x_min, moves)
        return ov_min, obj, moves.tolist()
    return run


def sa_case(ising, start, sweeps, rng):
    betas = np.geomspace(*beta_range(ising), sweeps)
    thresholds = -np.log1p(-rng.random((sweeps, start.size)))

    def run(mod):
        s = start.copy()
        best = np.empty_like(s)
        energies = mod.sa_kernel(ising.J, ising.h, s, betas, thresholds, best)
        return energies, best.tolist()
    return run


def exact_case(Q):
    return lambda mod: mod.exact_kernel(Q)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000, help="problem size for the tabu case")
    ap.add_argument("--m", type=int, default=50, help="subproblem size for the annealing case")
    ap.add_argument("--sweeps", type=int, default=200)
    ap.add_argument("--exact-m", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if compiled is None:
        raise SystemExit("compiled extension not built; run `pip install --no-build-isolation -e .`")

    rng = np.random.default_rng(args.seed)
    p = random_problem(rng, args.n)
    x0 = rng.integers(0, 2, args.n).astype(np.int8)
    big = random_problem(rng, args.m + 20, density=0.5)
    sub = build_subqubo(big, rng.integers(0, 2, big.n), np.arange(args.m))
    start = (2 * rng.integers(0, 2, args.m) - 1).astype(np.int8)
    cases = {
        f"tabu n={args.n} alpha={5 * args.n}": tabu_case(p, x0, 5 * args.n, max(1, args.n // 150)),
        f"anneal m={args.m} sweeps={args.sweeps}": sa_case(sub.to_ising(), start, args.sweeps, rng),
        f"exact m={args.exact_m}": exact_case(random_problem(rng, args.exact_m, density=1.0).Q),
    }

    print(f"{'kernel':32s} {'cython [s]':>11s} {'python [s]':>11s} {'speedup':>8s}")
    for name, run in cases.items():
        t_c, out_c = best_of(lambda: run(compiled), args.repeat)
        t_p, out_p = best_of(lambda: run(_kernels_py), 1 if "anneal" in name else args.repeat)
        if out_c != out_p:
            raise SystemExit(f"{name}: implementations disagree")
        print(f"{name:32s} {t_c:11.4f} {t_p:11.4f} {t_p / t_c:7.1f}x")


if __name__ == "__main__":
    main()
