"""Simulation: scripts, deterministic runs, ground-truth bookkeeping."""

import pytest

from cobotcell.errors import ContractViolation, ScenarioError
from cobotcell.events import EventKind
from cobotcell.job import HOMING_TASK_ID, JobSpec, TaskSpec
from cobotcell.sim import (
    ScenarioScript,
    ScriptAction,
    SimConfig,
    SimRunner,
    baseline_run,
    load_scenario,
    parse_scenario,
    run_scenario,
)


def real_ids(job):
    return frozenset(job.ids)


class TestScriptParsing:
    def test_full_round_trip(self):
        text = (
            "scenario demo\n"
            "seed 7\n"
            "at 0.5 human-speed 0.25\n"
            "at 0.8 message delegate 2\n"
            "at 1.0 message reassign 9\n"
            "at 1.2 robot-failure 7\n"
            "at 1.4 confirm 3\n"
        )
        script = parse_scenario(text)
        assert script.name == "demo" and script.seed == 7
        assert len(script.actions) == 5
        again = parse_scenario(script.render())
        assert again == script

    def test_comments_and_blanks_ignored(self):
        script = parse_scenario("# a comment\n\nscenario x\nseed 3\n")
        assert script == ScenarioScript(name="x", seed=3)

    @pytest.mark.parametrize(
        "line",
        [
            "at 0.5 human-speed",  # missing factor
            "at 0.5 human-speed 0.0",  # factor must be positive
            "at 0.5 human-speed -1.0",
            "at -1 human-speed 0.5",  # negative time
            "at 0.5 message promote 2",  # unknown verb
            "at 0.5 message delegate",  # missing task
            "at 0.5 teleport 2",  # unknown kind
            "at x human-speed 0.5",  # bad number
            "frobnicate",
        ],
    )
    def test_bad_lines_rejected(self, line):
        with pytest.raises(ScenarioError):
            parse_scenario(f"scenario bad\n{line}\n")

    def test_action_validation(self):
        with pytest.raises(ScenarioError):
            ScriptAction(at=0.5, kind="message", verb="delegate", task_id=0)
        with pytest.raises(ScenarioError):
            ScriptAction(at=0.5, kind="robot-failure", task_id=None)

    def test_validate_for_rejects_unknown_tasks(self, assembly_job):
        script = ScenarioScript(
            name="x", actions=(ScriptAction(at=0.1, kind="confirm", task_id=42),)
        )
        with pytest.raises(ScenarioError):
            script.validate_for(assembly_job)
        with pytest.raises(ScenarioError):
            SimRunner(assembly_job, script)

    def test_sorted_actions(self):
        script = ScenarioScript(
            name="x",
            actions=(
                ScriptAction(at=2.0, kind="confirm", task_id=1),
                ScriptAction(at=1.0, kind="confirm", task_id=2),
            ),
        )
        assert [a.at for a in script.sorted_actions()] == [1.0, 2.0]

    def test_bundled_scenarios_load(self, scenario_loader):
        for name in ("nominal", "experiment1", "experiment2", "experiment2-pending"):
            script = scenario_loader(name)
            assert script.name == name

    def test_save_load(self, tmp_path):
        script = ScenarioScript(
            name="saved",
            seed=4,
            actions=(ScriptAction(at=0.125, kind="human-speed", factor=0.5),),
        )
        path = tmp_path / "saved.scn"
        script.save(path)
        assert load_scenario(path) == script


class TestSimConfig:
    def test_tick_must_be_positive(self):
        with pytest.raises(ScenarioError):
            SimConfig(tick=0.0)


@pytest.fixture(scope="module")
def nominal_result(assembly_job, fine_config, scenario_loader):
    return run_scenario(assembly_job, scenario_loader("nominal"), fine_config)


class TestNominalRun:
    """With an on-pace human the offline schedule replays exactly."""

    @pytest.fixture()
    def result(self, nominal_result):
        return nominal_result

    def test_frozen_makespan_and_idle(self, result):
        assert result.makespan == 2.875  # equals the assignment's busy bound
        assert result.metrics.human_busy == 2.875
        assert result.metrics.human_idle == 0.0
        assert result.metrics.robot_busy == pytest.approx(1.65, abs=1e-12)
        assert result.metrics.robot_idle == pytest.approx(0.625, abs=1e-12)

    def test_no_reactive_interference(self, result):
        assert result.metrics.reschedule_count == 0
        assert result.metrics.messages_accepted == 0
        assert result.metrics.messages_rejected == 0
        holds = result.log.of_kind(EventKind.ROBOT_HELD)
        # the robot waits once for the preparatory gate, never for the window
        assert [(e.clock, e.payload["reason"]) for e in holds] == [(0.0, "gate")]

    def test_frozen_start_timeline(self, result):
        starts = [
            (e.clock, e.payload["task"], e.payload["agent"])
            for e in result.log.of_kind(EventKind.TASK_STARTED)
        ]
        assert starts == [
            (0.0, 1, "human"),
            (0.375, 2, "human"),
            (0.625, 3, "human"),
            (0.625, 7, "robot"),
            (0.975, 8, "robot"),
            (1.25, 4, "human"),
            (1.325, 9, "robot"),
            (1.675, 10, "robot"),
            (1.875, 5, "human"),
            (2.025, 11, "robot"),
            (2.5, 6, "human"),
        ]
        gate = result.log.of_kind(EventKind.GATE_OPENED)
        assert [e.clock for e in gate] == [0.625]

    def test_every_task_completes_exactly_once(self, result, assembly_job):
        assert result.final_state.done == real_ids(assembly_job)
        assert not result.final_state.failed and not result.final_state.aborted
        for task_id in assembly_job.ids:
            rec = result.completing_execution(task_id)
            assert rec is not None and rec.outcome == "completed"
            nominal = (
                assembly_job.task(task_id).t_human
                if rec.agent == "human"
                else assembly_job.task(task_id).t_robot
            )
            assert rec.duration == pytest.approx(nominal, abs=1e-9)
        assert result.completing_execution(HOMING_TASK_ID) is None

    def test_run_completed_event_matches_result(self, result):
        completed = result.log.of_kind(EventKind.RUN_COMPLETED)
        assert len(completed) == 1
        payload = completed[0].payload
        assert payload["makespan"] == result.makespan
        assert payload["metrics"] == result.metrics.to_dict()

    def test_every_event_carries_a_state_snapshot(self, result):
        for event in result.log:
            snap = event.payload["state"]
            assert set(snap) == {
                "l_human",
                "l_robot",
                "current_human",
                "current_robot",
                "done",
                "failed",
                "aborted",
                "gate_open",
            }

    def test_busy_equals_execution_durations(self, result):
        human = sum(r.duration for r in result.executions if r.agent == "human")
        robot = sum(r.duration for r in result.executions if r.agent == "robot")
        assert result.metrics.human_busy == pytest.approx(human)
        assert result.metrics.robot_busy == pytest.approx(robot)


class TestSlowdownRun:
    def test_reactive_beats_baseline_idle(self, assembly_job, fine_config, scenario_loader):
        script = scenario_loader("experiment1")
        reactive = run_scenario(assembly_job, script, fine_config)
        baseline = baseline_run(assembly_job, script, fine_config)
        assert reactive.metrics.reschedule_count >= 1
        assert baseline.metrics.reschedule_count == 0
        assert reactive.metrics.robot_idle < baseline.metrics.robot_idle - 1e-9
        assert reactive.makespan == pytest.approx(baseline.makespan, abs=1e-9)
        assert reactive.final_state.done == real_ids(assembly_job)
        assert baseline.final_state.done == real_ids(assembly_job)

    def test_baseline_still_holds_on_the_window(self, assembly_job, fine_config, scenario_loader):
        baseline = baseline_run(assembly_job, scenario_loader("experiment1"), fine_config)
        reasons = {e.payload["reason"] for e in baseline.log.of_kind(EventKind.ROBOT_HELD)}
        assert "window" in reasons


class TestDeterminism:
    def test_repeat_runs_are_byte_identical(self, assembly_job, fine_config, scenario_loader):
        script = scenario_loader("experiment1")
        a = run_scenario(assembly_job, script, fine_config)
        b = run_scenario(assembly_job, script, fine_config)
        assert a.log.to_jsonl() == b.log.to_jsonl()

    def test_seed_goes_into_the_run_header(self, assembly_job, fine_config, scenario_loader):
        result = run_scenario(assembly_job, scenario_loader("nominal"), fine_config)
        header = result.log[0]
        assert header.kind == "run-started"
        assert header.payload["seed"] == [1, 0]  # [script seed, config seed]
        assert header.payload["l_human"] == [1, 2, 3, 4, 5, 6]
        assert header.payload["l_robot"] == [7, 8, 9, 10, 11]


class TestFailureHandover:
    def test_failed_robot_task_moves_to_the_human(
        self, assembly_job, fine_config, scenario_loader
    ):
        script = parse_scenario("scenario fail9\nseed 1\nat 0.1 robot-failure 9\n")
        result = run_scenario(assembly_job, script, fine_config)
        failed_inject = result.log.of_kind(EventKind.ROBOT_FAILURE_INJECTED)
        assert [e.payload["task"] for e in failed_inject] == [9]
        handover = [
            e
            for e in result.log.of_kind(EventKind.MESSAGE_RECEIVED)
            if e.payload["kind"] == "handover-request"
        ]
        assert len(handover) == 1 and handover[0].payload["task"] == 9
        # the robot spent 2x nominal on it before asking for help
        aborted = [r for r in result.executions if r.task_id == 9 and r.outcome == "aborted"]
        assert len(aborted) == 1 and aborted[0].agent == "robot"
        assert aborted[0].duration == pytest.approx(
            2.0 * assembly_job.task(9).t_robot, abs=1e-9
        )
        rec = result.completing_execution(9)
        assert rec.agent == "human" and rec.outcome == "completed"
        assert 9 not in result.final_state.failed
        assert result.final_state.done == real_ids(assembly_job)
        # homing retraction ran exactly once
        homing = [r for r in result.executions if r.task_id == HOMING_TASK_ID]
        assert len(homing) == 1
        assert homing[0].duration == pytest.approx(fine_config.homing_duration, abs=1e-9)

    def test_unhandoverable_task_fails_terminally(self):
        job = JobSpec(
            name="giveup",
            normalization_base=1.0,
            tasks=(
                TaskSpec(id=1, label="shared", w_robot=0.5, t_robot=0.2, w_human=0.5, t_human=0.2),
                TaskSpec(
                    id=2,
                    label="robot only",
                    w_robot=0.5,
                    t_robot=0.2,
                    w_human=0.5,
                    t_human=0.2,
                    human_executable=False,
                ),
            ),
        )
        script = parse_scenario("scenario doomed\nat 0.0 robot-failure 2\n")
        result = run_scenario(job, script, SimConfig(tick=0.005))
        failed = result.log.of_kind(EventKind.TASK_FAILED)
        assert len(failed) == 1
        assert failed[0].payload == {
            "task": 2,
            "agent": "robot",
            "reason": "given-up",
            "state": failed[0].payload["state"],
        }
        assert result.final_state.failed == {2}
        assert result.final_state.done == {1, 2}  # terminal failure still closes the run
        rec = result.completing_execution(2)
        assert rec.outcome == "failed"
        assert rec.duration == pytest.approx(0.4, abs=1e-9)  # 2x nominal
        rejected = result.log.of_kind(EventKind.MESSAGE_REJECTED)
        assert [e.payload["reason"] for e in rejected] == ["not-human-executable"]


class TestOperatorScripts:
    def test_confirm_ends_the_current_task_early(
        self, assembly_job, fine_config, scenario_loader
    ):
        script = parse_scenario("scenario confirm\nseed 1\nat 0.2 confirm 1\n")
        result = run_scenario(assembly_job, script, fine_config)
        rec = result.completing_execution(1)
        assert rec.agent == "human" and rec.outcome == "completed"
        assert rec.end == pytest.approx(0.2, abs=1e-9)  # well before nominal 0.375
        # the whole schedule shifts earlier, so the run finishes sooner
        assert result.makespan < 2.875

    def test_delegate_script_migrates_and_reruns(
        self, assembly_job, fine_config, scenario_loader
    ):
        result = run_scenario(
            assembly_job, scenario_loader("experiment2"), fine_config
        )
        # task 2 was delegated while the human ran it: human aborts, robot reruns
        records = [r for r in result.executions if r.task_id == 2]
        assert [r.agent for r in records] == ["human", "robot"]
        assert [r.outcome for r in records] == ["aborted", "completed"]
        # task 9 was reassigned while the robot ran it: homing + human rerun
        records9 = [r for r in result.executions if r.task_id == 9]
        assert [(r.agent, r.outcome) for r in records9] == [
            ("robot", "aborted"),
            ("human", "completed"),
        ]
        assert result.final_state.done == real_ids(assembly_job)

    def test_offer_injects_between_ticks(self, assembly_job, fine_config, scenario_loader):
        runner = SimRunner(assembly_job, scenario_loader("nominal"), fine_config)
        while runner.clock < 0.5:
            runner.step()
        runner.offer(ScriptAction(at=runner.clock, kind="message", verb="delegate", task_id=4))
        events = runner.step()
        received = [
            e for e in events if e.kind == "message-received" and e.payload["kind"] == "delegate"
        ]
        assert len(received) == 1 and received[0].payload["task"] == 4
        result = runner.run()
        rec = result.completing_execution(4)
        assert rec.agent == "robot"

    def test_speed_change_event(self, assembly_job, fine_config, scenario_loader):
        result = run_scenario(assembly_job, scenario_loader("experiment1"), fine_config)
        changes = result.log.of_kind(EventKind.SPEED_CHANGED)
        assert [e.payload["factor"] for e in changes] == [0.05, 1.0]
        # clocks are tick multiples, so the script times land within one tick
        assert [e.clock for e in changes] == pytest.approx([0.95, 1.9], abs=0.005)


class TestSafetyAndErrors:
    def test_safety_horizon_stops_runaway_runs(self, assembly_job, scenario_loader):
        config = SimConfig(tick=0.005, max_time=0.5)
        runner = SimRunner(assembly_job, scenario_loader("nominal"), config)
        with pytest.raises(ContractViolation):
            runner.run()

    def test_result_before_finish_is_refused(self, assembly_job, fine_config, scenario_loader):
        runner = SimRunner(assembly_job, scenario_loader("nominal"), fine_config)
        runner.step()
        with pytest.raises(ContractViolation):
            runner.result()

    def test_steps_after_finish_are_inert(self, assembly_job, fine_config, scenario_loader):
        runner = SimRunner(assembly_job, scenario_loader("nominal"), fine_config)
        runner.run()
        seq = runner.log.last_seq
        assert runner.step() == []
        assert runner.log.last_seq == seq
