"""Hybrid QUBO solver: tabu search plus control-guided subQUBOs on an emulated Ising machine."""

from .driver import RunTrace, SolveResult, SolverConfig, solve, solve_ablated
from .kernels import IMPLEMENTATION
from .problem import (
    IsingProblem,
    QuboProblem,
    SolverState,
    apply_flip,
    evaluate,
    init_deltas,
    to_ising,
)
from .tabu import TabuConfig, TabuOutcome, tabu_search

__version__ = "0.1.0"

__all__ = [
    "IMPLEMENTATION", "IsingProblem", "QuboProblem", "RunTrace", "SolveResult", "SolverConfig",
    "SolverState", "TabuConfig", "TabuOutcome", "apply_flip", "evaluate", "init_deltas",
    "solve", "solve_ablated", "tabu_search", "to_ising",
]
