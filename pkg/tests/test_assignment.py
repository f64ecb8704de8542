"""Exact assignment search: frozen optimum, oracle agreement, structural laws."""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cobotcell.assignment import (
    ENUMERATE_MAX_TASKS,
    OBJECTIVE_TOL,
    SOLVE_MAX_TASKS,
    enumerate_assignments,
    enumerate_tied_optima,
    evaluate_assignment,
    solve_assignment,
)
from cobotcell.errors import CapacityError
from cobotcell.job import AgentId, JobSpec, TaskSpec

from .oracles import assignment_brute

# Values frozen from an exhaustive enumeration of the bundled 11-task job.
FROZEN_X_HUMAN = (1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0)
FROZEN_OBJECTIVE = 5.175000000000001
FROZEN_BUSY_BOUND = 2.875
FROZEN_LOAD_HUMAN = 2.875
FROZEN_LOAD_ROBOT = 1.65


def job_from_rows(rows) -> JobSpec:
    tasks = tuple(
        TaskSpec(
            id=i + 1,
            label=f"t{i + 1}",
            w_robot=wr,
            t_robot=tr,
            w_human=wh,
            t_human=th,
            robot_executable=exr,
            human_executable=exh,
        )
        for i, (wr, tr, wh, th, exr, exh) in enumerate(rows)
    )
    return JobSpec(name="generated", normalization_base=1.0, tasks=tasks)


def random_job(rng, n) -> JobSpec:
    rows = []
    for _ in range(n):
        exr, exh = True, True
        roll = rng.random()
        if roll < 0.15:
            exr = False
        elif roll < 0.30:
            exh = False
        rows.append(
            (
                float(1.0 - rng.random()),  # U(0, 1]
                float(1.0 - rng.random()),
                float(1.0 - rng.random()),
                float(1.0 - rng.random()),
                exr,
                exh,
            )
        )
    return job_from_rows(rows)


class TestBundledJob:
    def test_frozen_optimum(self, assembly_job):
        sol = solve_assignment(assembly_job)
        assert sol.x_human == FROZEN_X_HUMAN
        assert sol.l_human == (1, 2, 3, 4, 5, 6)
        assert sol.l_robot == (7, 8, 9, 10, 11)
        assert sol.objective == FROZEN_OBJECTIVE
        assert sol.busy_bound == FROZEN_BUSY_BOUND
        assert sol.load_human == FROZEN_LOAD_HUMAN
        assert sol.load_robot == FROZEN_LOAD_ROBOT

    def test_solver_matches_enumeration_bitwise(self, assembly_job):
        fast = solve_assignment(assembly_job)
        slow = enumerate_assignments(assembly_job)
        assert fast == slow
        assert np.float64(fast.objective).tobytes() == np.float64(slow.objective).tobytes()

    def test_optimum_is_unique(self, assembly_job):
        tied = enumerate_tied_optima(assembly_job)
        assert len(tied) == 1
        assert tied[0].x_human == FROZEN_X_HUMAN

    def test_accessors(self, assembly_job):
        sol = solve_assignment(assembly_job)
        assert sol.x_robot == tuple(1 - b for b in FROZEN_X_HUMAN)
        assert sol.agent_of(3) is AgentId.HUMAN
        assert sol.agent_of(9) is AgentId.ROBOT


class TestOracleAgreement:
    def test_random_jobs_match_exhaustive_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(120):
            job = random_job(rng, int(rng.integers(1, 11)))
            sol = solve_assignment(job)
            x, obj = assignment_brute(job.tasks)
            assert sol.x_human == x
            assert sol.objective == obj  # identical accumulation order, exact match

    def test_solver_matches_enumeration_on_randoms(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            job = random_job(rng, int(rng.integers(1, 13)))
            assert solve_assignment(job) == enumerate_assignments(job)


class TestEvaluate:
    def test_indicator_length_checked(self, assembly_job):
        with pytest.raises(ValueError):
            evaluate_assignment(assembly_job, (0, 1))

    def test_executability_enforced(self):
        job = job_from_rows([(0.5, 0.5, 0.5, 0.5, True, False)])
        with pytest.raises(ValueError):
            evaluate_assignment(job, (1,))
        sol = evaluate_assignment(job, (0,))
        assert sol.l_robot == (1,)

    def test_forced_assignment_respected_by_solver(self):
        # Robot-only and human-only tasks must land on their only agent even
        # when the weights point the other way.
        job = job_from_rows(
            [
                (9.0, 0.2, 0.1, 0.2, True, False),  # robot-only, expensive
                (0.1, 0.2, 9.0, 0.2, False, True),  # human-only, expensive
            ]
        )
        sol = solve_assignment(job)
        assert sol.x_human == (0, 1)


class TestCapacity:
    @staticmethod
    def _uniform_job(n):
        return job_from_rows([(0.5, 0.5, 0.5, 0.5, True, True)] * n)

    def test_solve_cap(self):
        with pytest.raises(CapacityError):
            solve_assignment(self._uniform_job(SOLVE_MAX_TASKS + 1))

    def test_enumerate_cap(self):
        with pytest.raises(CapacityError):
            enumerate_assignments(self._uniform_job(ENUMERATE_MAX_TASKS + 1))
        with pytest.raises(CapacityError):
            enumerate_tied_optima(self._uniform_job(ENUMERATE_MAX_TASKS + 1))

    def test_tie_reporting(self):
        # A fully symmetric task ties both placements.
        tied = enumerate_tied_optima(job_from_rows([(0.5, 0.5, 0.5, 0.5, True, True)]))
        assert [s.x_human for s in tied] == [(0,), (1,)]


values = st.floats(0.05, 1.0, allow_nan=False, allow_infinity=False)


@st.composite
def hypothesis_jobs(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    rows = [
        (draw(values), draw(values), draw(values), draw(values), True, True)
        for _ in range(n)
    ]
    return job_from_rows(rows)


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(hypothesis_jobs())
    def test_solver_equals_enumeration(self, job):
        assert solve_assignment(job) == enumerate_assignments(job)

    @settings(max_examples=40, deadline=None)
    @given(hypothesis_jobs())
    def test_scaling_both_cost_axes_preserves_the_winner(self, job):
        # Multiplying every weight and duration by the same power of two
        # scales the whole objective exactly, so a clearly-unique optimum
        # must keep the same indicator vector.
        assume(len(enumerate_tied_optima(job, tol=1e-6)) == 1)
        base = solve_assignment(job)
        scaled = JobSpec(
            name=job.name,
            normalization_base=job.normalization_base,
            tasks=tuple(
                TaskSpec(
                    id=t.id,
                    label=t.label,
                    w_robot=4.0 * t.w_robot,
                    t_robot=4.0 * t.t_robot,
                    w_human=4.0 * t.w_human,
                    t_human=4.0 * t.t_human,
                )
                for t in job.tasks
            ),
        )
        sol = solve_assignment(scaled)
        assert sol.x_human == base.x_human
        assert sol.objective == 4.0 * base.objective

    @settings(max_examples=40, deadline=None)
    @given(hypothesis_jobs(), st.data())
    def test_raising_the_losing_weight_changes_nothing(self, job, data):
        # Making the robot strictly worse at a task the human already owns
        # cannot move that task (or anything else) once the optimum is
        # clearly unique.
        assume(len(enumerate_tied_optima(job, tol=1e-6)) == 1)
        base = solve_assignment(job)
        human_tasks = [t.id for t in job.tasks if base.x_human[t.id - 1] == 1]
        assume(human_tasks)
        target = data.draw(st.sampled_from(human_tasks))
        bumped = JobSpec(
            name=job.name,
            normalization_base=job.normalization_base,
            tasks=tuple(
                TaskSpec(
                    id=t.id,
                    label=t.label,
                    w_robot=t.w_robot + (0.25 if t.id == target else 0.0),
                    t_robot=t.t_robot,
                    w_human=t.w_human,
                    t_human=t.t_human,
                )
                for t in job.tasks
            ),
        )
        sol = solve_assignment(bumped)
        assert sol.x_human == base.x_human
        assert sol.objective == base.objective

    @settings(max_examples=60, deadline=None)
    @given(hypothesis_jobs())
    def test_objective_definition(self, job):
        sol = solve_assignment(job)
        assert sol.busy_bound == max(sol.load_human, sol.load_robot)
        recomputed = evaluate_assignment(job, sol.x_human)
        assert recomputed == sol
        assert sol.objective >= sol.busy_bound - OBJECTIVE_TOL
