"""Tabu search over 1-flip moves with tenure memory and aspiration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .problem import QuboProblem, as_bits, evaluate, init_deltas


def default_tenure(n: int) -> int:
    return max(1, n // 150)


@dataclass(frozen=True)
class TabuConfig:
    """Iteration count and tabu tenure.

    Use :meth:`for_size` for the defaults ``alpha = 5n`` and
    ``tenure = max(1, n // 150)``.
    """

    alpha: int
    tenure_c: int

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.tenure_c < 1:
            raise ValueError("tenure_c must be at least 1")

    @classmethod
    def for_size(cls, n: int, alpha_factor: int = 5) -> "TabuConfig":
        return cls(alpha=alpha_factor * n, tenure_c=default_tenure(n))


@dataclass
class TabuOutcome:
    x_min: np.ndarray
    ov_min: int
    flip_counts: np.ndarray
    x_final: np.ndarray
    objective_final: int
    moves: np.ndarray


def tabu_search(problem: QuboProblem, x_start, config: TabuConfig, rng=None) -> TabuOutcome:
    """Run exactly ``config.alpha`` tabu iterations from ``x_start``.

    Each iteration flips the admissible variable with the smallest delta
    (lowest index on ties). A variable is admissible when its tabu counter
    is spent, or when flipping it would beat the best objective seen so far.
    If nothing is admissible the global smallest delta is taken.

    The search is deterministic; ``rng`` is accepted for interface symmetry
    with the stochastic components and is not consumed.
    """
    x = as_bits(x_start, problem.n).copy()
    deltas = init_deltas(problem, x)
    objective = evaluate(problem, x)
    flip_counts = np.zeros(problem.n, dtype=np.int64)
    x_min = x.copy()
    moves = np.empty(config.alpha, dtype=np.int64)
    ov_min, objective = kernels.tabu_kernel(
        problem.Q, x, deltas, objective, config.alpha, config.tenure_c,
        flip_counts, x_min, moves,
    )
    return TabuOutcome(
        x_min=x_min,
        ov_min=int(ov_min),
        flip_counts=flip_counts,
        x_final=x,
        objective_final=int(objective),
        moves=moves,
    )
