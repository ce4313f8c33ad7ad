"""The compiled kernels and the numpy fallback must agree exactly."""

import os

import numpy as np
import pytest

from hyqubo import _kernels_py, evaluate, init_deltas, kernels
from hyqubo.ising import beta_range, build_subqubo
from conftest import random_problem

compiled = pytest.importorskip("hyqubo._kernels")

IMPLS = [compiled, _kernels_py]


def run_tabu(mod, p, x, alpha, tenure):
    x = np.asarray(x, dtype=np.int8).copy()
    deltas = init_deltas(p, x)
    counts = np.zeros(p.n, dtype=np.int64)
    x_min = x.copy()
    moves = np.empty(alpha, dtype=np.int64)
    ov_min, obj = mod.tabu_kernel(p.Q, x, deltas, evaluate(p, x), alpha, tenure, counts, x_min, moves)
    return ov_min, obj, x, deltas, counts, x_min, moves


@pytest.mark.skipif(os.environ.get("HYQUBO_PURE_PYTHON") == "1", reason="fallback forced")
def test_default_is_compiled():
    assert kernels.IMPLEMENTATION == "cython"


@pytest.mark.parametrize("n,alpha,tenure", [(1, 5, 1), (7, 60, 3), (40, 400, 1), (40, 400, 12), (90, 900, 200)])
def test_tabu_kernels_agree(rng, n, alpha, tenure):
    p = random_problem(rng, n)
    x = rng.integers(0, 2, n)
    a, b = (run_tabu(mod, p, x, alpha, tenure) for mod in IMPLS)
    assert a[0] == b[0] and a[1] == b[1]
    for u, v in zip(a[2:], b[2:]):
        assert np.array_equal(u, v)


@pytest.mark.parametrize("m,sweeps", [(1, 10), (12, 200), (50, 300)])
def test_sa_kernels_agree(rng, m, sweeps):
    p = random_problem(rng, m + 10, limit=100)
    sub = build_subqubo(p, rng.integers(0, 2, p.n), np.arange(m))
    ising = sub.to_ising()
    betas = np.geomspace(*beta_range(ising), sweeps)
    thresholds = -np.log1p(-rng.random((sweeps, m)))
    start = (2 * rng.integers(0, 2, m) - 1).astype(np.int8)
    results = []
    for mod in IMPLS:
        s = start.copy()
        best = np.empty(m, dtype=np.int8)
        energies = mod.sa_kernel(ising.J, ising.h, s, betas, thresholds, best)
        results.append((energies, s, best))
    (ea, sa, ba), (eb, sb, bb) = results
    assert ea == eb
    assert np.array_equal(sa, sb) and np.array_equal(ba, bb)
    assert float(ising.energy(ba)) == ea[0]


@pytest.mark.parametrize("m", [1, 2, 5, 11, 15])
def test_exact_kernels_agree(rng, m):
    for _ in range(5):
        Q = random_problem(rng, m).Q
        assert compiled.exact_kernel(Q) == _kernels_py.exact_kernel(Q)
