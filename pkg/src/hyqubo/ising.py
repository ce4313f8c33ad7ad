"""SubQUBO extraction and emulated Ising-machine solvers.

A subQUBO fixes every variable outside ``indices`` at its current value and
folds their interaction with the free variables into the diagonal:

    b_i = sum_{j not in indices} 2 Q_ij x_j

so that ``sub.evaluate(y) == evaluate(problem, embed(x, indices, y))``.

Backends implement :class:`IsingBackend`. Anything exposing ``size`` and
``solve(sub, start, rng) -> bits`` can stand in for the emulators, e.g. a
client that ships ``sub.to_ising()`` to annealing hardware.
"""

from __future__ import annotations

import math
from concurrent.futures import Executor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .control import top_indices
from .problem import IsingProblem, QuboProblem, as_bits, to_ising

EXACT_LIMIT = 24


@dataclass(frozen=True, eq=False)
class SubQubo:
    indices: np.ndarray
    Q: np.ndarray
    offset: int

    @property
    def size(self) -> int:
        return self.indices.shape[0]

    def evaluate(self, y) -> int:
        y = as_bits(y, self.size).astype(np.int64)
        return int(y @ (self.Q @ y)) + self.offset

    def to_ising(self) -> IsingProblem:
        return to_ising(QuboProblem(self.Q, name="sub"))


def build_subqubo(problem: QuboProblem, x, indices) -> SubQubo:
    x = as_bits(x, problem.n)
    ix = np.asarray(indices, dtype=np.int64)
    if ix.ndim != 1 or np.unique(ix).size != ix.size:
        raise ValueError("subQUBO indices must be distinct")
    if ix.size and (ix.min() < 0 or ix.max() >= problem.n):
        raise IndexError("subQUBO index out of range")
    frozen = x.astype(np.int64)
    frozen[ix] = 0
    Q = problem.Q
    bias = 2 * (Q[ix] @ frozen)
    Qsub = np.ascontiguousarray(Q[np.ix_(ix, ix)])
    Qsub[np.diag_indices(ix.size)] += bias
    offset = int(frozen @ (Q @ frozen))
    return SubQubo(indices=ix, Q=Qsub, offset=offset)


def embed(x, indices, y) -> np.ndarray:
    out = np.array(x, dtype=np.int8, copy=True)
    out[np.asarray(indices, dtype=np.int64)] = y
    return out


# -- backends ---------------------------------------------------------------

class CapabilityError(ValueError):
    """The backend cannot take a subproblem of this size."""


class IsingBackend:
    """Interface for a size-limited subQUBO solver."""

    size: int = 50

    def solve(self, sub: SubQubo, start, rng) -> np.ndarray:
        raise NotImplementedError

    def _check(self, sub: SubQubo):
        if sub.size > self.size:
            raise CapabilityError(f"subQUBO of size {sub.size} exceeds machine size {self.size}")


class ExactBackend(IsingBackend):
    """Ground state by exhaustive Gray-code enumeration (``size <= 24``)."""

    def __init__(self, size: int = 16):
        if not 1 <= size <= EXACT_LIMIT:
            raise CapabilityError(f"exact backend supports sizes 1..{EXACT_LIMIT}, got {size}")
        self.size = size

    def solve(self, sub: SubQubo, start=None, rng=None) -> np.ndarray:
        self._check(sub)
        return solve_exact(sub)


def solve_exact(sub: SubQubo) -> np.ndarray:
    """Global minimizer of ``sub``; ties go to the lowest binary value (bit 0 least significant)."""
    m = sub.size
    if m > EXACT_LIMIT:
        raise CapabilityError(f"exact enumeration limited to {EXACT_LIMIT} variables, got {m}")
    if m == 0:
        return np.empty(0, dtype=np.int8)
    code, _ = kernels.exact_kernel(np.ascontiguousarray(sub.Q, dtype=np.int64))
    return ((int(code) >> np.arange(m)) & 1).astype(np.int8)


def beta_range(ising: IsingProblem) -> tuple[float, float]:
    """Hot/cold inverse temperatures from the spread of single-flip energy changes.

    Hot: the largest possible uphill move is accepted with probability 1/2.
    Cold: the smallest nonzero move is accepted with probability 1/100.
    """
    J, h = ising.J, ising.h
    max_delta = float(np.max(2.0 * (2.0 * np.abs(J).sum(axis=1) + np.abs(h)), initial=0.0))
    nonzero = np.concatenate([4.0 * np.abs(J[J != 0]), 2.0 * np.abs(h[h != 0])])
    if max_delta == 0.0 or nonzero.size == 0:
        return 1.0, 1.0
    min_delta = float(nonzero.min())
    hot = math.log(2.0) / max_delta
    cold = math.log(100.0) / min_delta
    return hot, max(hot, cold)


class AnnealingBackend(IsingBackend):
    """Single-spin-flip simulated annealing on the Ising form, geometric schedule."""

    def __init__(self, size: int = 50, sweeps: int = 1000):
        if size < 1 or sweeps < 1:
            raise ValueError("size and sweeps must be positive")
        self.size = size
        self.sweeps = sweeps

    def solve(self, sub: SubQubo, start, rng) -> np.ndarray:
        self._check(sub)
        return solve_annealed(sub, start, rng, sweeps=self.sweeps)


def solve_annealed(sub: SubQubo, start, rng, sweeps: int = 1000) -> np.ndarray:
    """Best assignment visited by the annealer, starting from ``start``."""
    m = sub.size
    if m == 0:
        return np.empty(0, dtype=np.int8)
    start = as_bits(np.zeros(m) if start is None else start, m)
    ising = sub.to_ising()
    hot, cold = beta_range(ising)
    betas = np.geomspace(hot, cold, sweeps)
    thresholds = -np.log1p(-rng.random((sweeps, m)))
    s = (2 * start - 1).astype(np.int8)
    best = np.empty(m, dtype=np.int8)
    kernels.sa_kernel(
        np.ascontiguousarray(ising.J), np.ascontiguousarray(ising.h), s, betas,
        np.ascontiguousarray(thresholds), best,
    )
    return ((best + 1) // 2).astype(np.int8)


@dataclass(frozen=True)
class IsingBackendSpec:
    kind: str = "annealing"
    size: int = 50
    sa_sweeps: int = 1000

    def build(self, n: int | None = None) -> IsingBackend:
        """Instantiate, clamping the machine size to ``n`` if given."""
        size = self.size if n is None else min(self.size, n)
        if self.kind == "exact":
            return ExactBackend(size)
        if self.kind == "annealing":
            return AnnealingBackend(size, self.sa_sweeps)
        raise ValueError(f"unknown backend kind {self.kind!r}")


# -- solution-set passes ----------------------------------------------------

def segments(n: int, m: int) -> list[np.ndarray]:
    """Contiguous blocks of size ``m`` plus a trailing short block."""
    return [np.arange(lo, min(lo + m, n)) for lo in range(0, n, m)]


def _solve_into(problem, backend, row, indices, rng):
    sub = build_subqubo(problem, row, indices)
    row[indices] = backend.solve(sub, row[indices], rng)


def _map_rows(fn, z, executor):
    if executor is None:
        for p in range(z):
            fn(p)
    else:
        list(executor.map(fn, range(z)))


def im_solution_set(solution_set: np.ndarray, problem: QuboProblem, backend: IsingBackend,
                    rngs, executor: Executor | None = None) -> np.ndarray:
    """Sweep every row segment by segment, left to right, in place.

    Each segment is biased by the current values of all other variables,
    including segments already rewritten in this pass.
    """
    blocks = segments(problem.n, min(backend.size, problem.n))

    def run(p):
        row = solution_set[p]
        for block in blocks:
            _solve_into(problem, backend, row, block, rngs[p])

    _map_rows(run, solution_set.shape[0], executor)
    return solution_set


def im_partial_solution_set(solution_set: np.ndarray, A: np.ndarray, problem: QuboProblem,
                            backend: IsingBackend, rngs, executor: Executor | None = None):
    """One sub-solve per row over its ``m`` highest-``A`` variables.

    Returns the updated set and, per row, the indices the machine rewrote.
    """
    m = min(backend.size, problem.n)
    chosen = [top_indices(A[p], m) for p in range(solution_set.shape[0])]

    def run(p):
        _solve_into(problem, backend, solution_set[p], chosen[p], rngs[p])

    _map_rows(run, solution_set.shape[0], executor)
    return solution_set, chosen
