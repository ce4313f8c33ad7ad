"""QUBO problem representation, objective evaluation and 1-flip deltas.

Convention
----------
``Q`` is stored full and symmetric.  The objective is

    f(x) = sum_i Q[i, i] x_i + sum_i sum_{j != i} Q[i, j] x_i x_j = x^T Q x

so an interaction listed once as ``(i, j, v)`` contributes ``2 v`` when both
variables are set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

_INT64_LIMIT = 2**63


def as_bits(x, n: int | None = None) -> np.ndarray:
    """Return ``x`` as a contiguous int8 0/1 vector, checking length."""
    arr = np.ascontiguousarray(x, dtype=np.int8)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d bit vector, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"bit vector has length {arr.shape[0]}, expected {n}")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("bit vector entries must be 0 or 1")
    return arr


@dataclass(frozen=True, eq=False)
class QuboProblem:
    """Dense symmetric integer QUBO, always posed as a minimization.

    Parameters
    ----------
    Q : array_like
        Square integer matrix. Must be symmetric.
    name : str
        Identifier used in reports.
    negated : bool
        True if the source instance was a maximization problem whose
        coefficients were negated on load.
    """

    Q: np.ndarray
    name: str = "qubo"
    negated: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        Q = np.asarray(self.Q)
        if Q.dtype.kind not in "iub":
            if not np.all(np.equal(np.mod(Q, 1), 0)):
                raise ValueError("Q must contain integers")
        Q = np.ascontiguousarray(Q, dtype=np.int64)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError(f"Q must be square, got shape {Q.shape}")
        if Q.shape[0] < 1:
            raise ValueError("Q must have at least one variable")
        if not np.array_equal(Q, Q.T):
            raise ValueError("Q must be symmetric")
        n = Q.shape[0]
        # worst case |f| <= n^2 max|Q|; keep it inside int64
        if int(np.abs(Q).max()) * n * n >= _INT64_LIMIT:
            raise OverflowError("coefficients too large for exact int64 objectives")
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @classmethod
    def from_triplets(cls, n: int, triplets: Iterable[tuple[int, int, int]],
                      name: str = "qubo", negated: bool = False) -> "QuboProblem":
        """Build from 0-indexed ``(i, j, v)`` triplets; ``Q[i, j] = Q[j, i] = v``."""
        Q = np.zeros((n, n), dtype=np.int64)
        for i, j, v in triplets:
            Q[i, j] = v
            Q[j, i] = v
        return cls(Q, name=name, negated=negated)

    def evaluate(self, x) -> int:
        return evaluate(self, x)


def evaluate(problem: QuboProblem, x) -> int:
    """Exact integer objective ``x^T Q x``."""
    x = as_bits(x, problem.n).astype(np.int64)
    return int(x @ (problem.Q @ x))


def init_deltas(problem: QuboProblem, x) -> np.ndarray:
    """Objective change for flipping each variable of ``x``.

    ``deltas[k] = (1 - 2 x_k) * (Q_kk + 2 * sum_{j != k} Q_jk x_j)``.  The
    factor 2 comes from the symmetric storage: both ``Q_jk`` and ``Q_kj``
    multiply ``x_j x_k``.
    """
    x = as_bits(x, problem.n).astype(np.int64)
    Q = problem.Q
    diag = np.diagonal(Q)
    interaction = Q @ x - diag * x
    return (1 - 2 * x) * (diag + 2 * interaction)


class SolverState:
    """A candidate solution with its objective and live 1-flip deltas."""

    __slots__ = ("x", "objective", "deltas")

    def __init__(self, problem: QuboProblem, x):
        self.x = as_bits(x, problem.n).copy()
        self.objective = evaluate(problem, self.x)
        self.deltas = init_deltas(problem, self.x)

    def copy(self) -> "SolverState":
        new = object.__new__(SolverState)
        new.x = self.x.copy()
        new.objective = self.objective
        new.deltas = self.deltas.copy()
        return new


def apply_flip(state: SolverState, problem: QuboProblem, i: int) -> None:
    """Flip ``x_i`` in place and update objective and deltas in O(n)."""
    n = problem.n
    if not 0 <= i < n:
        raise IndexError(f"flip index {i} out of range for n={n}")
    d = int(state.deltas[i])
    step = 2 * (1 - 2 * int(state.x[i]))
    state.deltas += step * problem.Q[i] * (1 - 2 * state.x.astype(np.int64))
    state.deltas[i] = -d
    state.objective += d
    state.x[i] = 1 - state.x[i]


@dataclass(frozen=True, eq=False)
class IsingProblem:
    """``E(s) = -sum_ij J_ij s_i s_j - sum_i h_i s_i`` over spins in {-1, +1}.

    ``J`` and ``h`` hold quarter- and half-integers, which float64 represents
    exactly; ``offset`` is kept as a Fraction.  ``E(2x - 1) + offset == f(x)``.
    """

    J: np.ndarray
    h: np.ndarray
    offset: Fraction

    def energy(self, s) -> Fraction:
        """Exact energy via 4x-scaled integer arithmetic."""
        s = np.asarray(s, dtype=np.int64)
        J4 = np.rint(self.J * 4).astype(np.int64)
        h4 = np.rint(self.h * 4).astype(np.int64)
        return Fraction(-int(s @ (J4 @ s)) - int(h4 @ s), 4)


def to_ising(problem: QuboProblem) -> IsingProblem:
    """Substitute ``x = (s + 1) / 2`` into the QUBO objective."""
    Q = problem.Q
    diag = np.diagonal(Q)
    off_row = Q.sum(axis=1) - diag
    J = -Q.astype(np.float64) / 4.0
    np.fill_diagonal(J, 0.0)
    h = -(diag + off_row).astype(np.float64) / 2.0
    offset = Fraction(int(Q.sum() - diag.sum()), 4) + Fraction(int(diag.sum()), 2)
    return IsingProblem(J=J, h=h, offset=offset)
