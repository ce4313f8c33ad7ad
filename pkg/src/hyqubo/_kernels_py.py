"""Pure-Python / numpy versions of the inner loops in ``_kernels.pyx``.

Every function here takes and mutates the same buffers as its compiled
twin and must produce identical results; ``tests/test_kernels.py`` checks
that on random inputs.
"""

from __future__ import annotations

import numpy as np


def tabu_kernel(Q, x, deltas, objective, alpha, tenure, flip_counts, x_min, moves):
    n = x.shape[0]
    objective = int(objective)
    ov_min = objective
    tabu = np.zeros(n, dtype=np.int64)
    sign = 1 - 2 * x.astype(np.int64)
    for it in range(alpha):
        admissible = (tabu <= 0) | (objective + deltas < ov_min)
        candidates = np.flatnonzero(admissible)
        if candidates.size:
            i = int(candidates[np.argmin(deltas[candidates])])
        else:
            i = int(np.argmin(deltas))
        d = int(deltas[i])
        deltas += (2 * int(sign[i])) * Q[i] * sign
        deltas[i] = -d
        objective += d
        x[i] = 1 - x[i]
        sign[i] = -sign[i]
        tabu[i] += tenure
        tabu[tabu > 0] -= 1
        flip_counts[i] += 1
        moves[it] = i
        if objective < ov_min:
            ov_min = objective
            x_min[:] = x
    return ov_min, objective


def sa_kernel(J, h, s, betas, thresholds, best):
    m = s.shape[0]
    field = J @ s.astype(np.float64)
    energy = float(-(s @ field) - (h @ s))
    best_energy = energy
    best[:] = s
    for t in range(betas.shape[0]):
        beta = float(betas[t])
        row = thresholds[t]
        for i in range(m):
            si = float(s[i])
            dE = 2.0 * si * (2.0 * float(field[i]) + float(h[i]))
            if dE <= 0.0 or beta * dE < row[i]:
                field -= (2.0 * si) * J[i]
                s[i] = -s[i]
                energy += dE
                if energy < best_energy:
                    best_energy = energy
                    best[:] = s
    return best_energy, energy


_CHUNK_BITS = 14


def exact_kernel(Q):
    m = Q.shape[0]
    best_code = 0
    best_energy = 0
    chunk = 1 << min(m, _CHUNK_BITS)
    shifts = np.arange(m, dtype=np.int64)
    for start in range(0, 1 << m, chunk):
        codes = np.arange(start, start + chunk, dtype=np.int64)
        X = (codes[:, None] >> shifts) & 1
        energies = np.einsum("ki,ki->k", X @ Q, X)
        k = int(np.argmin(energies))
        if energies[k] < best_energy:
            best_energy = int(energies[k])
            best_code = int(codes[k])
    return best_code, best_energy
