"""Control parameters that rank variables for the Ising machine and mutation.

``eta``
    column absolute weight mass of Q, fixed per problem.
``delta_stab``
    per-solution stability, 1 for variables tabu search never touched.
``gamma``
    disagreement of each variable across the solution set.

They are combined row-wise into ``A = w1*eta_norm + w2*gamma - w3*delta_stab``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problem import QuboProblem


def weight_effect(problem: QuboProblem) -> np.ndarray:
    """``eta[j] = sum_i |Q[i, j]|``, diagonal included."""
    return np.abs(problem.Q).sum(axis=0).astype(np.int64)


def normalize_minmax(v: np.ndarray) -> np.ndarray:
    """Scale to [0, 1]; a constant vector maps to zeros."""
    v = np.asarray(v, dtype=np.float64)
    if v.size == 0:
        return v
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros_like(v)
    return (v - lo) / (hi - lo)


def stability(flip_counts: np.ndarray) -> np.ndarray:
    """``1 - T / max(T)`` along the last axis; all ones where nothing flipped.

    Accepts one row of flip counts or a (z, n) matrix.
    """
    T = np.asarray(flip_counts, dtype=np.float64)
    peak = T.max(axis=-1, keepdims=True)
    safe = np.where(peak > 0, peak, 1.0)
    return np.where(peak > 0, 1.0 - T / safe, 1.0)


def deviation(solution_set: np.ndarray) -> np.ndarray:
    """``gamma_j = 1 - |sum_i S_ij - z/2| / (z/2)``."""
    S = np.asarray(solution_set)
    if S.ndim != 2 or S.shape[0] < 1:
        raise ValueError("solution set must be a non-empty (z, n) matrix")
    half = S.shape[0] / 2.0
    return 1.0 - np.abs(S.sum(axis=0) - half) / half


@dataclass
class ControlParams:
    eta: np.ndarray
    delta_stab: np.ndarray
    gamma: np.ndarray
    w1: float = 1.0
    w2: float = 1.0
    w3: float = 0.5


def aggregate(params: ControlParams) -> np.ndarray:
    """Row-wise weighted sum; ``params.eta`` is expected already normalized."""
    shared = params.w1 * np.asarray(params.eta, dtype=np.float64) \
        + params.w2 * np.asarray(params.gamma, dtype=np.float64)
    return shared[None, :] - params.w3 * np.atleast_2d(params.delta_stab)


# -- mutation-rate annealers ------------------------------------------------

def cosine_rate(t: int) -> float:
    return 0.3 * (1.0 + math.cos(math.pi * t / 15.0)) * 0.99**t


@dataclass
class AnnealerState:
    """Mutation-rate schedule. ``kind`` is ``cosine``, ``constant`` or ``step``.

    ``constant`` holds ``start``; ``step`` starts at ``start`` and drops by
    ``step_size`` every ``step_every`` iterations, never below zero.
    """

    kind: str = "cosine"
    t: int = 0
    start: float = 0.6
    step_size: float = 0.05
    step_every: int = 2

    def __post_init__(self):
        if self.kind not in ANNEALERS:
            raise ValueError(f"unknown annealer {self.kind!r}; choose from {sorted(ANNEALERS)}")

    @property
    def r(self) -> float:
        return ANNEALERS[self.kind](self)


ANNEALERS = {
    "cosine": lambda a: cosine_rate(a.t),
    "constant": lambda a: a.start,
    "step": lambda a: max(0.0, a.start - a.step_size * (a.t // a.step_every)),
}


def next_rate(state: AnnealerState) -> AnnealerState:
    state.t += 1
    return state


# -- mutation ---------------------------------------------------------------

def top_indices(scores: np.ndarray, k: int, pool: np.ndarray | None = None) -> np.ndarray:
    """The ``k`` highest-scoring indices (ties to the lower index), sorted ascending."""
    idx = np.arange(scores.shape[0]) if pool is None else np.asarray(pool)
    if k <= 0 or idx.size == 0:
        return np.empty(0, dtype=np.int64)
    order = np.argsort(-scores[idx], kind="stable")
    return np.sort(idx[order[:k]]).astype(np.int64)


def mutation_subset_size(pool_size: int, r: float) -> int:
    return int(math.floor(pool_size * r))


def mutate_row(x: np.ndarray, scores: np.ndarray, r: float, excluded, rng) -> np.ndarray:
    """Mutate one solution in place; returns the flipped indices.

    The subset is the ``floor(|pool| * r)`` highest-scoring variables outside
    ``excluded``. Each subset member flips with probability equal to its
    min-max normalized score within the subset (1 for a singleton or a flat
    subset).
    """
    n = x.shape[0]
    mask = np.ones(n, dtype=bool)
    if excluded is not None and len(excluded):
        mask[np.asarray(excluded, dtype=np.int64)] = False
    pool = np.flatnonzero(mask)
    k = mutation_subset_size(pool.size, r)
    subset = top_indices(scores, k, pool)
    if subset.size == 0:
        return subset
    vals = scores[subset]
    lo, hi = vals.min(), vals.max()
    probs = np.ones(subset.size) if hi == lo else (vals - lo) / (hi - lo)
    u = rng.random(subset.size)
    flipped = subset[u < probs]
    x[flipped] = 1 - x[flipped]
    return flipped


def mutate(solution_set: np.ndarray, A: np.ndarray, r: float, im_solved_indices, rngs) -> np.ndarray:
    """Mutate every row of ``solution_set`` in place and return it.

    ``rngs`` holds one generator per row so the outcome does not depend on
    evaluation order.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"mutation rate {r} outside [0, 1]")
    for p in range(solution_set.shape[0]):
        excluded = im_solved_indices[p] if im_solved_indices is not None else None
        mutate_row(solution_set[p], A[p], r, excluded, rngs[p])
    return solution_set
