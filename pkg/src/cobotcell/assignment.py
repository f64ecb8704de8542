"""Exact two-agent task assignment balancing total effort against cell busy time.

Every task goes to exactly one agent (human or robot, subject to per-task
executability flags).  The cost of a complete assignment is the sum of the
chosen per-task weights plus the busy time of the more-loaded agent (the
normalized makespan lower bound), so the optimum trades effort-aligned
placement against load balance.

`solve_assignment` runs a depth-first branch-and-bound over the 2^N candidate
bit-vectors; `enumerate_assignments` is the plain exhaustive reference with
identical floating-point evaluation order, so both return bit-identical
objectives and the same winner.  Both visit candidates in ascending
bit-vector order (task 1 = most significant bit, robot = 0) and replace the
incumbent only on improvement beyond a 1e-9 tolerance, which makes the result
deterministic: among tolerance-ties the lexicographically smallest human
indicator vector wins, i.e. low-numbered tasks prefer the robot.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapacityError
from .job import AgentId, JobSpec, TaskList

#: Objectives closer than this are treated as tied (first visited wins).
OBJECTIVE_TOL = 1e-9

#: Hard size caps for the exact searches.
SOLVE_MAX_TASKS = 24
ENUMERATE_MAX_TASKS = 20


@dataclass(frozen=True, slots=True)
class AssignmentSolution:
    """One complete task-to-agent assignment and its evaluated cost.

    Attributes:
        x_human:   per-task indicator, index i-1 is 1 if task i goes to the human.
        l_human:   human task ids in ascending id order (the nominal order).
        l_robot:   robot task ids in ascending id order.
        load_human / load_robot: summed normalized durations per agent.
        busy_bound: max of the two loads (minimum possible cell busy time).
        objective: total weight plus busy_bound.
    """

    x_human: tuple[int, ...]
    l_human: TaskList
    l_robot: TaskList
    load_human: float
    load_robot: float
    busy_bound: float
    objective: float

    @property
    def x_robot(self) -> tuple[int, ...]:
        return tuple(1 - b for b in self.x_human)

    def agent_of(self, task_id: int) -> AgentId:
        return AgentId.HUMAN if self.x_human[task_id - 1] else AgentId.ROBOT


def evaluate_assignment(job: JobSpec, x_human: tuple[int, ...]) -> AssignmentSolution:
    """Evaluate one indicator vector.  Accumulation is in ascending task id
    order everywhere so that identical vectors always yield identical floats.
    """
    if len(x_human) != len(job):
        raise ValueError(f"indicator length {len(x_human)} != task count {len(job)}")
    weight = 0.0
    load_h = 0.0
    load_r = 0.0
    l_h: list[int] = []
    l_r: list[int] = []
    for task, bit in zip(job.tasks, x_human):
        if bit:
            if not task.human_executable:
                raise ValueError(f"task {task.id} is not human-executable")
            weight += task.w_human
            load_h += task.t_human
            l_h.append(task.id)
        else:
            if not task.robot_executable:
                raise ValueError(f"task {task.id} is not robot-executable")
            weight += task.w_robot
            load_r += task.t_robot
            l_r.append(task.id)
    busy = max(load_h, load_r)
    return AssignmentSolution(
        x_human=tuple(x_human),
        l_human=tuple(l_h),
        l_robot=tuple(l_r),
        load_human=load_h,
        load_robot=load_r,
        busy_bound=busy,
        objective=weight + busy,
    )


def solve_assignment(job: JobSpec) -> AssignmentSolution:
    """Exact branch-and-bound solve.

    Tasks are branched in id order, robot branch first, so leaves are reached
    in ascending indicator order; the incumbent is replaced only when the new
    objective beats it by more than OBJECTIVE_TOL.  A subtree is cut when an
    admissible lower bound (weights so far + best possible remaining weights
    + larger current load) cannot beat the incumbent by the tolerance, which
    never cuts a leaf the exhaustive reference would have accepted.
    """
    n = len(job)
    if n > SOLVE_MAX_TASKS:
        raise CapacityError(
            f"exact assignment solve caps at {SOLVE_MAX_TASKS} tasks (job has {n})"
        )
    tasks = job.tasks
    # Suffix sums of the per-task cheapest executable weight, for the bound.
    min_weight_suffix = [0.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        t = tasks[i]
        if t.robot_executable and t.human_executable:
            mw = min(t.w_robot, t.w_human)
        elif t.robot_executable:
            mw = t.w_robot
        else:
            mw = t.w_human
        min_weight_suffix[i] = min_weight_suffix[i + 1] + mw

    best_obj = float("inf")
    best_x: tuple[int, ...] | None = None
    bits = [0] * n

    def walk(i: int, weight: float, load_h: float, load_r: float) -> None:
        nonlocal best_obj, best_x
        if i == n:
            obj = weight + max(load_h, load_r)
            if obj < best_obj - OBJECTIVE_TOL:
                best_obj = obj
                best_x = tuple(bits)
            return
        bound = weight + min_weight_suffix[i] + max(load_h, load_r)
        if bound >= best_obj - OBJECTIVE_TOL:
            return
        t = tasks[i]
        if t.robot_executable:
            bits[i] = 0
            walk(i + 1, weight + t.w_robot, load_h, load_r + t.t_robot)
        if t.human_executable:
            bits[i] = 1
            walk(i + 1, weight + t.w_human, load_h + t.t_human, load_r)
        bits[i] = 0

    walk(0, 0.0, 0.0, 0.0)
    assert best_x is not None  # every task has at least one executable agent
    return evaluate_assignment(job, best_x)


def enumerate_assignments(job: JobSpec) -> AssignmentSolution:
    """Exhaustive reference solve: every feasible indicator vector in
    ascending order, strict-improvement-only replacement.  Same result and
    same floats as `solve_assignment`, at 2^N cost.
    """
    n = len(job)
    if n > ENUMERATE_MAX_TASKS:
        raise CapacityError(
            f"exhaustive assignment enumeration caps at {ENUMERATE_MAX_TASKS} tasks "
            f"(job has {n})"
        )
    tasks = job.tasks
    best: AssignmentSolution | None = None
    for mask in range(1 << n):
        x = tuple((mask >> (n - 1 - i)) & 1 for i in range(n))
        if any(
            (bit and not t.human_executable) or (not bit and not t.robot_executable)
            for t, bit in zip(tasks, x)
        ):
            continue
        sol = evaluate_assignment(job, x)
        if best is None or sol.objective < best.objective - OBJECTIVE_TOL:
            best = sol
    assert best is not None
    return best


def enumerate_tied_optima(job: JobSpec, tol: float = OBJECTIVE_TOL) -> list[AssignmentSolution]:
    """All feasible assignments whose objective is within `tol` of the global
    optimum, in ascending indicator order.  Length 1 means the optimum is
    unique at that tolerance.
    """
    n = len(job)
    if n > ENUMERATE_MAX_TASKS:
        raise CapacityError(
            f"exhaustive assignment enumeration caps at {ENUMERATE_MAX_TASKS} tasks "
            f"(job has {n})"
        )
    tasks = job.tasks
    evaluated: list[AssignmentSolution] = []
    best_obj = float("inf")
    for mask in range(1 << n):
        x = tuple((mask >> (n - 1 - i)) & 1 for i in range(n))
        if any(
            (bit and not t.human_executable) or (not bit and not t.robot_executable)
            for t, bit in zip(tasks, x)
        ):
            continue
        sol = evaluate_assignment(job, x)
        evaluated.append(sol)
        if sol.objective < best_obj:
            best_obj = sol.objective
    return [s for s in evaluated if s.objective <= best_obj + tol]
