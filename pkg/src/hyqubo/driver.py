"""End-to-end hybrid solve: tabu search, control-guided subQUBOs, mutation."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .control import (
    AnnealerState,
    ControlParams,
    aggregate,
    deviation,
    mutate,
    next_rate,
    normalize_minmax,
    stability,
    weight_effect,
)
from .ising import IsingBackendSpec, im_partial_solution_set, im_solution_set
from .problem import QuboProblem, evaluate
from .tabu import TabuConfig, default_tenure, tabu_search

MODES = ("full", "no_sm", "no_im")

# RNG stream tags; each (seed, tag, epoch, row) names an independent stream
INIT, IM_INIT, IM_PARTIAL, MUTATION, UNIFORM_A, PERTURB, SUBSET = range(7)


def stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters. ``alpha`` and ``tenure_c`` default from ``n`` when None."""

    z: int = 4
    alpha: int | None = None
    tenure_c: int | None = None
    w1: float = 1.0
    w2: float = 1.0
    w3: float = 0.5
    m: int = 50
    backend: str = "annealing"
    sa_sweeps: int = 1000
    patience: int = 30
    epoch_cap: int = 300
    annealer: str = "cosine"
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.z < 1:
            raise ValueError("z must be at least 1")
        if self.patience < 1:
            raise ValueError("patience must be at least 1")
        if self.epoch_cap < 0:
            raise ValueError("epoch_cap must be non-negative")
        if self.m < 1:
            raise ValueError("m must be positive")
        AnnealerState(kind=self.annealer)

    def tabu_for(self, n: int) -> TabuConfig:
        alpha = 5 * n if self.alpha is None else self.alpha
        tenure = default_tenure(n) if self.tenure_c is None else self.tenure_c
        return TabuConfig(alpha=alpha, tenure_c=tenure)

    def backend_spec(self) -> IsingBackendSpec:
        return IsingBackendSpec(kind=self.backend, size=self.m, sa_sweeps=self.sa_sweeps)

    def with_(self, **changes) -> "SolverConfig":
        return replace(self, **changes)


@dataclass
class EpochRecord:
    epoch: int
    best: int
    objectives: list[int]
    rate: float | None
    tabu_iterations: int
    wall_time: float


@dataclass
class RunTrace:
    records: list[EpochRecord] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def best_series(self) -> list[int]:
        return [r.best for r in self.records]

    def to_jsonl(self, include_timing: bool = False) -> str:
        """One JSON object per epoch. Timing is off by default so equal seeds give equal bytes."""
        lines = [json.dumps({"meta": self.meta}, sort_keys=True)]
        for rec in self.records:
            row = asdict(rec)
            if not include_timing:
                row.pop("wall_time")
            lines.append(json.dumps(row, sort_keys=True))
        return "\n".join(lines) + "\n"


@dataclass
class SolveResult:
    x: np.ndarray
    objective: int
    trace: RunTrace

    @property
    def epochs(self) -> int:
        """Main-loop epochs executed (the initialization record is epoch 0)."""
        return self.trace.records[-1].epoch if self.trace.records else 0

    @property
    def epochs_to_best(self) -> int:
        for rec in self.trace.records:
            if rec.best == self.objective:
                return rec.epoch
        return self.epochs

    def epochs_to_reach(self, target: int) -> int | None:
        for rec in self.trace.records:
            if rec.best <= target:
                return rec.epoch
        return None


class Incumbent:
    """Best solution seen; stored apart from the solution set so mutation never touches it."""

    def __init__(self, n: int):
        self.x = np.zeros(n, dtype=np.int8)
        self.objective: int | None = None

    def offer(self, x, objective: int) -> bool:
        if self.objective is None or objective < self.objective:
            self.x = np.array(x, dtype=np.int8, copy=True)
            self.objective = int(objective)
            return True
        return False


@contextmanager
def _executor(workers: int):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            yield ex
    else:
        yield None


def _map(executor, fn, items):
    if executor is None:
        return [fn(i) for i in items]
    return list(executor.map(fn, items))


def solve(problem: QuboProblem, config: SolverConfig | None = None, mode: str = "full") -> SolveResult:
    """Minimize ``problem``; returns the incumbent and a per-epoch trace.

    ``mode`` selects the full method or an ablation: ``no_sm`` ranks variables
    by fresh uniform noise instead of the control parameters, ``no_im`` skips
    both Ising-machine passes and lets mutation draw from all variables.
    """
    config = config or SolverConfig()
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")
    n, z, seed = problem.n, config.z, config.seed
    tabu_cfg = config.tabu_for(n)
    backend = config.backend_spec().build(n)
    use_im = mode != "no_im"
    t0 = time.perf_counter()

    trace = RunTrace(meta={
        "algorithm": "hybrid" if mode == "full" else mode,
        "problem": problem.name,
        "n": n,
        "seed": seed,
        "z": z,
        "alpha": tabu_cfg.alpha,
        "tenure_c": tabu_cfg.tenure_c,
        "m": backend.size,
        "backend": config.backend,
        "weights": [config.w1, config.w2, config.w3],
        "annealer": config.annealer,
        "subset_selection": "uniform" if mode == "no_sm" else "control",
        "ising_machine": use_im,
        "mutation": True,
        "warnings": [],
    })
    if config.m > n:
        trace.meta["warnings"].append(f"machine size {config.m} clamped to n={n}")

    incumbent = Incumbent(n)
    S = np.stack([stream(seed, INIT, p).integers(0, 2, n, dtype=np.int8) for p in range(z)])

    # shared across modes for a given seed, so ablations start from the same point
    trace.meta["init_best"] = min(evaluate(problem, row) for row in S)

    with _executor(config.workers) as ex:
        if use_im:
            im_solution_set(S, problem, backend, [stream(seed, IM_INIT, p) for p in range(z)], ex)
        objectives = [evaluate(problem, S[p]) for p in range(z)]
        for p in range(z):
            incumbent.offer(S[p], objectives[p])
        trace.records.append(EpochRecord(0, incumbent.objective, objectives, None, 0,
                                         time.perf_counter() - t0))

        annealer = AnnealerState(kind=config.annealer)
        eta = normalize_minmax(weight_effect(problem))
        stale = 0
        for epoch in range(1, config.epoch_cap + 1):
            before = incumbent.objective

            outcomes = _map(ex, lambda p: tabu_search(problem, S[p], tabu_cfg), range(z))
            T = np.stack([o.flip_counts for o in outcomes])
            for p, o in enumerate(outcomes):
                S[p] = o.x_min
                incumbent.offer(o.x_min, o.ov_min)

            if mode == "no_sm":
                A = np.stack([stream(seed, UNIFORM_A, epoch, p).random(n) for p in range(z)])
            else:
                A = aggregate(ControlParams(eta=eta, delta_stab=stability(T), gamma=deviation(S),
                                            w1=config.w1, w2=config.w2, w3=config.w3))

            if use_im:
                rngs = [stream(seed, IM_PARTIAL, epoch, p) for p in range(z)]
                S, solved = im_partial_solution_set(S, A, problem, backend, rngs, ex)
                for p in range(z):
                    incumbent.offer(S[p], evaluate(problem, S[p]))
            else:
                solved = [None] * z

            rate = annealer.r
            mutate(S, A, rate, solved, [stream(seed, MUTATION, epoch, p) for p in range(z)])
            objectives = [evaluate(problem, S[p]) for p in range(z)]
            for p in range(z):
                incumbent.offer(S[p], objectives[p])
            next_rate(annealer)

            trace.records.append(EpochRecord(epoch, incumbent.objective, objectives, rate,
                                             tabu_cfg.alpha * z, time.perf_counter() - t0))
            stale = 0 if incumbent.objective < before else stale + 1
            if stale >= config.patience:
                break

    return SolveResult(x=incumbent.x, objective=incumbent.objective, trace=trace)


def solve_ablated(problem: QuboProblem, config: SolverConfig | None = None, mode: str = "no_sm") -> SolveResult:
    if mode not in ("no_sm", "no_im"):
        raise ValueError("ablation mode must be 'no_sm' or 'no_im'")
    return solve(problem, config, mode=mode)
