"""Independent reference implementations used to check the package's results.

These deliberately avoid the package's algorithms: plain exhaustive loops and
full quadratic tables, written for obviousness rather than speed.  Where a
result is defined up to a tie rule, the oracle replicates the documented rule
(first candidate in visiting order wins / lexicographically smallest set).
"""

from __future__ import annotations

import numpy as np

TOL = 1e-9


# --- open-end DTW ----------------------------------------------------------


def dtw_full_table(query: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Accumulated-cost table D[i, j] for query prefix i+1 vs reference
    prefix j+1, Euclidean sample distance, symmetric steps."""
    q = np.asarray(query, dtype=np.float64)
    r = np.asarray(ref, dtype=np.float64)
    n, m = q.shape[0], r.shape[0]
    table = np.empty((n, m), dtype=np.float64)
    for i in range(n):
        for j in range(m):
            diff = q[i] - r[j]
            d = float(np.sqrt(np.sum(diff * diff)))
            if i == 0 and j == 0:
                table[i, j] = d
            elif i == 0:
                table[i, j] = table[i, j - 1] + d
            elif j == 0:
                table[i, j] = table[i - 1, j] + d
            else:
                table[i, j] = d + min(
                    table[i - 1, j], table[i - 1, j - 1], table[i, j - 1]
                )
    return table


def open_end_completion_from_row(row: np.ndarray) -> float:
    m = row.shape[0]
    return (int(np.argmin(row)) + 1) / m


# --- budget-constrained duration fill --------------------------------------


def knapsack_brute(durations: np.ndarray, budget: float) -> tuple[float, tuple[int, ...]]:
    """Exhaustive reference for the refill search.

    Returns (best total, included indices).  Visits every subset in the same
    order as an include-first depth-first walk (bit n-1-i for item i, so
    masks descend) and applies the same replacement rule: better than the
    incumbent by > TOL, or within TOL with a lexicographically smaller index
    set (= numerically larger mask).
    """
    arr = np.asarray(durations, dtype=np.float64)
    n = arr.shape[0]
    # Subset totals for every mask, accumulated in ascending item order —
    # the same float addition sequence a per-mask loop would use.  Item i
    # occupies bit n-1-i, so extending the prefix by item i doubles the
    # table: even slots exclude it, odd slots include it.
    totals = np.zeros(1, dtype=np.float64)
    for i in range(n):
        doubled = np.empty(2 * totals.shape[0], dtype=np.float64)
        doubled[0::2] = totals
        doubled[1::2] = totals + arr[i]
        totals = doubled
    best_total = 0.0
    best_mask = 0
    for mask in range((1 << n) - 1, -1, -1):
        total = totals[mask]
        if total > budget + TOL:
            continue
        if total > best_total + TOL:
            best_total = total
            best_mask = mask
        elif total >= best_total - TOL and mask > best_mask:
            best_total = total
            best_mask = mask
    included = tuple(i for i in range(n) if best_mask & (1 << (n - 1 - i)))
    return float(best_total), included


def knapsack_fill_brute(
    candidate_ids: list[int], durations: dict[int, float], budget: float
) -> tuple[tuple[int, ...], float]:
    """Id-level wrapper matching the package's refill contract (candidates
    considered ascending, selection returned ascending)."""
    ids = sorted(candidate_ids)
    arr = np.array([durations[t] for t in ids], dtype=np.float64)
    total, idx = knapsack_brute(arr, budget)
    return tuple(ids[i] for i in idx), total


# --- two-agent assignment --------------------------------------------------


def assignment_brute(tasks) -> tuple[tuple[int, ...], float]:
    """Exhaustive assignment reference.

    `tasks` is a sequence of objects with w_robot/t_robot/w_human/t_human and
    executability flags.  Returns (per-task human indicator, objective),
    visiting indicator vectors in ascending order (task 1 = most significant
    bit) and replacing only on improvement beyond TOL, so among tolerance
    ties the smallest indicator vector wins.
    """
    n = len(tasks)
    best_obj = float("inf")
    best_x: tuple[int, ...] | None = None
    for mask in range(1 << n):
        x = tuple((mask >> (n - 1 - i)) & 1 for i in range(n))
        weight = 0.0
        load_h = 0.0
        load_r = 0.0
        feasible = True
        for task, bit in zip(tasks, x):
            if bit:
                if not task.human_executable:
                    feasible = False
                    break
                weight += task.w_human
                load_h += task.t_human
            else:
                if not task.robot_executable:
                    feasible = False
                    break
                weight += task.w_robot
                load_r += task.t_robot
        if not feasible:
            continue
        obj = weight + max(load_h, load_r)
        if obj < best_obj - TOL:
            best_obj = obj
            best_x = x
    assert best_x is not None
    return best_x, best_obj
