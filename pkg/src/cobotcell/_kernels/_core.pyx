# cython: boundscheck=False, wraparound=False
"""Compiled kernels: DTW cost-row updates and the knapsack fill search.

Must stay operation-for-operation identical to `_pure.py`; the fallback
tests assert bit-identical outputs.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

BACKEND = "compiled"

cdef double _TOL = 1e-9


def dtw_update_row(prev_row, sample, ref):
    """Extend a DTW accumulated-cost table by one input sample.

    Same contract as the pure fallback: Euclidean per-sample distance,
    symmetric steps, `prev_row` is None for the first input sample.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] r = np.ascontiguousarray(ref, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s = np.ascontiguousarray(sample, dtype=np.float64)
    cdef Py_ssize_t m = r.shape[0]
    cdef Py_ssize_t d = r.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] row = np.empty(m, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] prev
    cdef Py_ssize_t j, k
    cdef double dist, diff, acc, best
    if prev_row is None:
        acc = 0.0
        for j in range(m):
            dist = 0.0
            for k in range(d):
                diff = s[k] - r[j, k]
                dist += diff * diff
            dist = sqrt(dist)
            if j == 0:
                acc = dist
            else:
                acc = acc + dist
            row[j] = acc
    else:
        prev = np.ascontiguousarray(prev_row, dtype=np.float64)
        if prev.shape[0] != m:
            raise ValueError(f"prev_row length {prev.shape[0]} != reference length {m}")
        for j in range(m):
            dist = 0.0
            for k in range(d):
                diff = s[k] - r[j, k]
                dist += diff * diff
            dist = sqrt(dist)
            if j == 0:
                best = prev[0]
            else:
                best = prev[j]
                if prev[j - 1] < best:
                    best = prev[j - 1]
                if row[j - 1] < best:
                    best = row[j - 1]
            row[j] = dist + best
    return row


cdef void _walk(double* dur, double* suffix, double budget, Py_ssize_t n,
                Py_ssize_t i, double total, unsigned long long cur,
                double* best_total, unsigned long long* best_mask) noexcept:
    cdef double cap, ub, di
    if i == n:
        if total > best_total[0] + _TOL:
            best_total[0] = total
            best_mask[0] = cur
        elif total >= best_total[0] - _TOL and cur > best_mask[0]:
            best_total[0] = total
            best_mask[0] = cur
        return
    cap = budget - total
    ub = suffix[i]
    if cap < ub:
        ub = cap
    if total + ub < best_total[0] - _TOL:
        return
    di = dur[i]
    if di <= cap + _TOL:
        _walk(dur, suffix, budget, n, i + 1, total + di,
              cur | (1ULL << (n - 1 - i)), best_total, best_mask)
    _walk(dur, suffix, budget, n, i + 1, total, cur, best_total, best_mask)


def knapsack_select(durations, double budget):
    """Maximal-total subset under budget; ties to the lex-smallest index set."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dur = np.ascontiguousarray(durations, dtype=np.float64)
    cdef Py_ssize_t n = dur.shape[0]
    if n > 63:
        raise ValueError(f"too many knapsack candidates ({n} > 63)")
    if n == 0:
        return 0.0, np.zeros(0, dtype=np.uint8)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] suffix = np.empty(n + 1, dtype=np.float64)
    cdef Py_ssize_t i
    suffix[n] = 0.0
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + dur[i]
    cdef double best_total = 0.0
    cdef unsigned long long best_mask = 0
    _walk(&dur[0], &suffix[0], budget, n, 0, 0.0, 0, &best_total, &best_mask)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] mask = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        if best_mask & (1ULL << (n - 1 - i)):
            mask[i] = 1
    return float(best_total), mask
