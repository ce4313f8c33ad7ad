# cython: language_level=3
"""Compiled inner loops. Semantics mirror ``_kernels_py`` bit for bit."""

from libc.stdint cimport int8_t, int64_t
from libc.stdlib cimport calloc, free



def tabu_kernel(const int64_t[:, ::1] Q, int8_t[::1] x, int64_t[::1] deltas,
                int64_t objective, Py_ssize_t alpha, int64_t tenure,
                int64_t[::1] flip_counts, int8_t[::1] x_min, int64_t[::1] moves):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t it, k, i, j
    cdef int64_t ov_min = objective
    cdef int64_t d, dbest, step
    cdef int64_t *C = <int64_t *> calloc(n if n > 0 else 1, sizeof(int64_t))
    if C == NULL:
        raise MemoryError()
    try:
        with nogil:
            for it in range(alpha):
                i = -1
                dbest = 0
                for k in range(n):
                    d = deltas[k]
                    if C[k] <= 0 or objective + d < ov_min:
                        if i < 0 or d < dbest:
                            i = k
                            dbest = d
                if i < 0:
                    # everything tabu and nothing aspirates
                    i = 0
                    dbest = deltas[0]
                    for k in range(1, n):
                        if deltas[k] < dbest:
                            i = k
                            dbest = deltas[k]
                step = 2 * (1 - 2 * x[i])
                for j in range(n):
                    if x[j]:
                        deltas[j] -= step * Q[i, j]
                    else:
                        deltas[j] += step * Q[i, j]
                deltas[i] = -dbest
                objective += dbest
                x[i] = 1 - x[i]
                C[i] += tenure
                for k in range(n):
                    if C[k] > 0:
                        C[k] -= 1
                flip_counts[i] += 1
                moves[it] = i
                if objective < ov_min:
                    ov_min = objective
                    for k in range(n):
                        x_min[k] = x[k]
    finally:
        free(C)
    return ov_min, objective


def sa_kernel(const double[:, ::1] J, const double[::1] h, int8_t[::1] s,
              const double[::1] betas, const double[:, ::1] thresholds,
              int8_t[::1] best):
    cdef Py_ssize_t m = s.shape[0]
    cdef Py_ssize_t sweeps = betas.shape[0]
    cdef Py_ssize_t t, i, j
    cdef double energy = 0.0, best_energy, dE, beta, si
    cdef double *field = <double *> calloc(m if m > 0 else 1, sizeof(double))
    if field == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(m):
                for j in range(m):
                    field[i] += J[i, j] * s[j]
            for i in range(m):
                energy -= s[i] * field[i] + h[i] * s[i]
            best_energy = energy
            for i in range(m):
                best[i] = s[i]
            for t in range(sweeps):
                beta = betas[t]
                for i in range(m):
                    si = s[i]
                    dE = 2.0 * si * (2.0 * field[i] + h[i])
                    if dE <= 0.0 or beta * dE < thresholds[t, i]:
                        for j in range(m):
                            field[j] -= 2.0 * si * J[i, j]
                        s[i] = -s[i]
                        energy += dE
                        if energy < best_energy:
                            best_energy = energy
                            for j in range(m):
                                best[j] = s[j]
    finally:
        free(field)
    return best_energy, energy


def exact_kernel(const int64_t[:, ::1] Q):
    cdef Py_ssize_t m = Q.shape[0]
    cdef Py_ssize_t a, b
    cdef unsigned long long k, total, g, best_code = 0
    cdef int64_t energy = 0, best_energy = 0, step, da
    cdef int64_t *d = <int64_t *> calloc(m if m > 0 else 1, sizeof(int64_t))
    cdef int8_t *y = <int8_t *> calloc(m if m > 0 else 1, sizeof(int8_t))
    if d == NULL or y == NULL:
        free(d)
        free(y)
        raise MemoryError()
    try:
        with nogil:
            total = (<unsigned long long> 1) << m
            for a in range(m):
                d[a] = Q[a, a]
            for k in range(1, total):
                a = 0
                while not ((k >> a) & 1):
                    a += 1
                da = d[a]
                energy += da
                step = 2 * (1 - 2 * y[a])
                for b in range(m):
                    if y[b]:
                        d[b] -= step * Q[a, b]
                    else:
                        d[b] += step * Q[a, b]
                y[a] = 1 - y[a]
                d[a] = -da
                g = k ^ (k >> 1)
                if energy < best_energy or (energy == best_energy and g < best_code):
                    best_energy = energy
                    best_code = g
    finally:
        free(d)
        free(y)
    return best_code, best_energy
