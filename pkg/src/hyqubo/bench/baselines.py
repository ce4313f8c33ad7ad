"""Simplified reimplementations of two comparison solvers.

``d2ts``
    classical only: repeated tabu rounds from a perturbed incumbent.
``random_subqubo``
    tabu plus one Ising-machine solve of a uniformly random subset per epoch,
    with the same backend and machine size as the hybrid solver.

Neither claims fidelity to the published originals beyond their tabu budget.
Both spend ``z * alpha`` tabu iterations per epoch (``20n`` at the defaults),
the same as one epoch of :func:`hyqubo.driver.solve`.
"""

from __future__ import annotations

import time

import numpy as np

from ..driver import (
    INIT,
    PERTURB,
    SUBSET,
    EpochRecord,
    Incumbent,
    RunTrace,
    SolveResult,
    SolverConfig,
    stream,
)
from ..ising import build_subqubo
from ..problem import QuboProblem, evaluate
from ..tabu import TabuConfig, tabu_search

LABEL = "simplified reimplementation"


def _round_config(problem: QuboProblem, config: SolverConfig) -> TabuConfig:
    base = config.tabu_for(problem.n)
    return TabuConfig(alpha=config.z * base.alpha, tenure_c=base.tenure_c)


def _meta(name, problem, config, tabu_cfg, **flags):
    meta = {
        "algorithm": name,
        "label": LABEL,
        "problem": problem.name,
        "n": problem.n,
        "seed": config.seed,
        "alpha": tabu_cfg.alpha,
        "tenure_c": tabu_cfg.tenure_c,
        "mutation": False,
        "annealer": None,
        "warnings": [],
    }
    meta.update(flags)
    return meta


def baseline_d2ts(problem: QuboProblem, config: SolverConfig | None = None,
                  perturb_fraction: float = 0.25) -> SolveResult:
    """Diversified tabu restarts. Round 1 is a plain tabu search from a random start."""
    config = config or SolverConfig()
    n, seed = problem.n, config.seed
    tabu_cfg = _round_config(problem, config)
    trace = RunTrace(meta=_meta("d2ts", problem, config, tabu_cfg, ising_machine=False,
                                subset_selection=None, perturb_fraction=perturb_fraction))
    t0 = time.perf_counter()
    incumbent = Incumbent(n)
    x = stream(seed, INIT, 0).integers(0, 2, n, dtype=np.int8)
    incumbent.offer(x, evaluate(problem, x))
    trace.records.append(EpochRecord(0, incumbent.objective, [incumbent.objective], None, 0,
                                     time.perf_counter() - t0))
    k = max(1, int(round(perturb_fraction * n)))
    stale = 0
    for epoch in range(1, config.epoch_cap + 1):
        before = incumbent.objective
        if epoch > 1:
            x = incumbent.x.copy()
            flips = stream(seed, PERTURB, epoch).choice(n, size=min(k, n), replace=False)
            x[flips] = 1 - x[flips]
        out = tabu_search(problem, x, tabu_cfg)
        incumbent.offer(out.x_min, out.ov_min)
        x = out.x_min
        trace.records.append(EpochRecord(epoch, incumbent.objective, [out.ov_min], None,
                                         tabu_cfg.alpha, time.perf_counter() - t0))
        stale = 0 if incumbent.objective < before else stale + 1
        if stale >= config.patience:
            break
    return SolveResult(x=incumbent.x, objective=incumbent.objective, trace=trace)


def baseline_random_subqubo(problem: QuboProblem, config: SolverConfig | None = None) -> SolveResult:
    """Tabu, then solve a random size-``m`` subQUBO and write it back; repeat."""
    config = config or SolverConfig()
    n, seed = problem.n, config.seed
    tabu_cfg = _round_config(problem, config)
    backend = config.backend_spec().build(n)
    trace = RunTrace(meta=_meta("random_subqubo", problem, config, tabu_cfg, ising_machine=True,
                                subset_selection="uniform", m=backend.size,
                                backend=config.backend))
    t0 = time.perf_counter()
    incumbent = Incumbent(n)
    x = stream(seed, INIT, 0).integers(0, 2, n, dtype=np.int8)
    incumbent.offer(x, evaluate(problem, x))
    trace.records.append(EpochRecord(0, incumbent.objective, [incumbent.objective], None, 0,
                                     time.perf_counter() - t0))
    stale = 0
    for epoch in range(1, config.epoch_cap + 1):
        before = incumbent.objective
        out = tabu_search(problem, x, tabu_cfg)
        incumbent.offer(out.x_min, out.ov_min)
        x = out.x_min.copy()
        rng = stream(seed, SUBSET, epoch)
        subset = np.sort(rng.choice(n, size=backend.size, replace=False))
        x[subset] = backend.solve(build_subqubo(problem, x, subset), x[subset], rng)
        objective = evaluate(problem, x)
        incumbent.offer(x, objective)
        trace.records.append(EpochRecord(epoch, incumbent.objective, [objective], None,
                                         tabu_cfg.alpha, time.perf_counter() - t0))
        stale = 0 if incumbent.objective < before else stale + 1
        if stale >= config.patience:
            break
    return SolveResult(x=incumbent.x, objective=incumbent.objective, trace=trace)
