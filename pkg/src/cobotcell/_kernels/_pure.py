"""Pure-Python fallback kernels.

Mirrors `_core.pyx` operation for operation: identical float expression
order, so both backends produce bit-identical results.  Slow, but keeps the
package importable without a compiler.
"""

import math

import numpy as np

BACKEND = "pure"

_TOL = 1e-9


def dtw_update_row(prev_row, sample, ref):
    """Extend a DTW accumulated-cost table by one input sample.

    `ref` is the (m, d) reference series, `sample` one d-vector of the live
    input.  `prev_row` is the cost row for the input so far (None for the
    first sample).  Returns the (m,) cost row including `sample`, using
    Euclidean per-sample distance and symmetric steps (match/insert/delete).
    """
    ref = np.asarray(ref, dtype=np.float64)
    sample = np.asarray(sample, dtype=np.float64)
    m, d = ref.shape
    row = np.empty(m, dtype=np.float64)
    if prev_row is None:
        acc = 0.0
        for j in range(m):
            dist = 0.0
            for k in range(d):
                diff = sample[k] - ref[j, k]
                dist += diff * diff
            dist = math.sqrt(dist)
            acc = dist if j == 0 else acc + dist
            row[j] = acc
    else:
        prev = np.asarray(prev_row, dtype=np.float64)
        if prev.shape[0] != m:
            raise ValueError(f"prev_row length {prev.shape[0]} != reference length {m}")
        for j in range(m):
            dist = 0.0
            for k in range(d):
                diff = sample[k] - ref[j, k]
                dist += diff * diff
            dist = math.sqrt(dist)
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


def knapsack_select(durations, budget):
    """Pick the subset of durations with maximal total not exceeding budget.

    Candidates are identified by position; ties on total (within 1e-9) go to
    the lexicographically smallest position set.  Returns (total, mask) with
    mask a uint8 selection vector.  Depth-first branch and bound, taking the
    include branch first so the first optimum found is the lex-smallest.
    """
    durations = np.asarray(durations, dtype=np.float64)
    n = durations.shape[0]
    if n > 63:
        raise ValueError(f"too many knapsack candidates ({n} > 63)")
    suffix = np.empty(n + 1, dtype=np.float64)
    suffix[n] = 0.0
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + durations[i]
    # Selection sets as bitmasks with position 0 at the highest bit, so a
    # numerically larger mask is lexicographically smaller as an id set.
    best = [0.0, 0]

    def walk(i, total, cur):
        if i == n:
            if total > best[0] + _TOL:
                best[0] = total
                best[1] = cur
            elif total >= best[0] - _TOL and cur > best[1]:
                best[0] = total
                best[1] = cur
            return
        cap = budget - total
        ub = suffix[i]
        if cap < ub:
            ub = cap
        if total + ub < best[0] - _TOL:
            return
        di = durations[i]
        if di <= cap + _TOL:
            walk(i + 1, total + di, cur | (1 << (n - 1 - i)))
        walk(i + 1, total, cur)

    walk(0, 0.0, 0)
    mask = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        if best[1] & (1 << (n - 1 - i)):
            mask[i] = 1
    return float(best[0]), mask
