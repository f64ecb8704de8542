"""Deterministic tick-driven execution of a job under a scenario script.

The simulation owns ground truth: it advances the human's progress at a
scriptable speed, synthesizes the motion samples the progress monitor sees
(reference trajectory at the true phase plus seeded Gaussian jitter), tracks
the robot's elapsed time, and feeds everything into `scheduler_step` once per
tick.  All randomness comes from one seeded generator, so a given job +
scenario + config always produces a byte-identical event log.

Scenario scripts are small text files driving the environment and the
operator::

    scenario <name>
    seed <int>
    at <t> human-speed <factor>
    at <t> robot-failure <task-id>
    at <t> message delegate <task-id>
    at <t> message reassign <task-id>
    at <t> confirm <task-id>
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .assignment import AssignmentSolution, solve_assignment
from .errors import ContractViolation, ScenarioError
from .events import Event, EventKind, EventLog
from .job import HOMING_TASK_ID, JobSpec
from .monitor import ReferenceLibrary, TaskMonitor, synthetic_library
from .scheduler import (
    DEFAULT_HOMING_DURATION,
    DEFAULT_TIMEOUT_FACTOR,
    Message,
    MessageKind,
    SchedulerConfig,
    SchedulerState,
    Sender,
    StepInputs,
    make_initial_state,
    monitor_robot,
    scheduler_step,
)

_ACTION_KINDS = ("human-speed", "robot-failure", "message", "confirm")
_MESSAGE_VERBS = {
    "delegate": MessageKind.DELEGATE_TO_ROBOT,
    "reassign": MessageKind.REASSIGN_TO_HUMAN,
}


@dataclass(frozen=True, slots=True)
class ScriptAction:
    at: float
    kind: str  # one of _ACTION_KINDS
    task_id: int | None = None
    factor: float | None = None
    verb: str | None = None  # for kind == "message": "delegate" | "reassign"

    def __post_init__(self) -> None:
        if self.kind not in _ACTION_KINDS:
            raise ScenarioError(f"unknown scenario action kind {self.kind!r}")
        if not (self.at >= 0.0):
            raise ScenarioError(f"action time must be >= 0, got {self.at}")
        if self.kind == "human-speed":
            if self.factor is None or not (self.factor > 0.0):
                raise ScenarioError(f"human-speed needs a positive factor, got {self.factor}")
        else:
            if self.task_id is None or self.task_id < 1:
                raise ScenarioError(f"{self.kind} needs a task id >= 1, got {self.task_id}")
        if self.kind == "message" and self.verb not in _MESSAGE_VERBS:
            raise ScenarioError(f"message verb must be delegate or reassign, got {self.verb!r}")


@dataclass(frozen=True, slots=True)
class ScenarioScript:
    name: str
    seed: int = 0
    actions: tuple[ScriptAction, ...] = ()

    def sorted_actions(self) -> tuple[ScriptAction, ...]:
        return tuple(sorted(self.actions, key=lambda a: a.at))

    def validate_for(self, job: JobSpec) -> None:
        ids = set(job.ids)
        for a in self.actions:
            if a.task_id is not None and a.task_id not in ids:
                raise ScenarioError(
                    f"scenario {self.name!r} references unknown task {a.task_id}"
                )

    def render(self) -> str:
        lines = [f"scenario {self.name}", f"seed {self.seed}"]
        for a in self.sorted_actions():
            if a.kind == "human-speed":
                lines.append(f"at {a.at!r} human-speed {a.factor!r}")
            elif a.kind == "message":
                lines.append(f"at {a.at!r} message {a.verb} {a.task_id}")
            else:
                lines.append(f"at {a.at!r} {a.kind} {a.task_id}")
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.render(), encoding="utf-8")


def parse_scenario(text: str, name_hint: str = "scenario") -> ScenarioScript:
    name = name_hint
    seed = 0
    actions: list[ScriptAction] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "scenario" and len(parts) == 2:
                name = parts[1]
            elif parts[0] == "seed" and len(parts) == 2:
                seed = int(parts[1])
            elif parts[0] == "at":
                at = float(parts[1])
                kind = parts[2]
                if kind == "human-speed" and len(parts) == 4:
                    actions.append(ScriptAction(at=at, kind=kind, factor=float(parts[3])))
                elif kind in ("robot-failure", "confirm") and len(parts) == 4:
                    actions.append(ScriptAction(at=at, kind=kind, task_id=int(parts[3])))
                elif kind == "message" and len(parts) == 5:
                    actions.append(
                        ScriptAction(at=at, kind=kind, verb=parts[3], task_id=int(parts[4]))
                    )
                else:
                    raise ScenarioError(f"line {lineno}: cannot parse {line!r}")
            else:
                raise ScenarioError(f"line {lineno}: cannot parse {line!r}")
        except (ValueError, IndexError) as exc:
            raise ScenarioError(f"line {lineno}: cannot parse {line!r}") from exc
    return ScenarioScript(name=name, seed=seed, actions=tuple(actions))


def load_scenario(path: str | Path) -> ScenarioScript:
    p = Path(path)
    return parse_scenario(p.read_text(encoding="utf-8"), name_hint=p.stem)


@dataclass(frozen=True, slots=True)
class SimConfig:
    tick: float = 0.01
    seed: int = 0
    jitter_sigma: float = 0.01
    timeout_factor: float = DEFAULT_TIMEOUT_FACTOR
    homing_duration: float = DEFAULT_HOMING_DURATION
    max_time: float = 200.0
    scheduler: SchedulerConfig = SchedulerConfig()

    def __post_init__(self) -> None:
        if not (self.tick > 0.0):
            raise ScenarioError(f"tick must be positive, got {self.tick}")


@dataclass(frozen=True, slots=True)
class ExecutionRecord:
    """One contiguous stretch of an agent working a task.

    Outcomes: "completed" (ran to the end), "abandoned" (force-ended by the
    operator but still counted done), "aborted" (stopped because the task
    migrated to the other agent; it re-runs there), "failed" (terminal
    give-up after a handover was impossible)."""

    task_id: int
    agent: str
    start: float
    end: float
    outcome: str

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True, slots=True)
class RunMetrics:
    makespan: float
    human_busy: float
    human_idle: float
    robot_busy: float
    robot_idle: float
    reschedule_count: int
    messages_accepted: int
    messages_rejected: int

    def to_dict(self) -> dict:
        return {
            "makespan": self.makespan,
            "human_busy": self.human_busy,
            "human_idle": self.human_idle,
            "robot_busy": self.robot_busy,
            "robot_idle": self.robot_idle,
            "reschedule_count": self.reschedule_count,
            "messages_accepted": self.messages_accepted,
            "messages_rejected": self.messages_rejected,
        }


@dataclass(frozen=True, slots=True)
class RunResult:
    job_name: str
    scenario_name: str
    rescheduling: bool
    makespan: float
    metrics: RunMetrics
    log: EventLog
    final_state: SchedulerState
    executions: tuple[ExecutionRecord, ...]

    def completing_execution(self, task_id: int) -> ExecutionRecord | None:
        """The execution that put `task_id` into the done set, if any."""
        for rec in self.executions:
            if rec.task_id == task_id and rec.outcome in ("completed", "abandoned", "failed"):
                return rec
        return None


class _AgentTrack:
    """Ground-truth execution tracking for one agent inside the simulator."""

    __slots__ = ("task_id", "start_clock", "elapsed")

    def __init__(self) -> None:
        self.task_id: int | None = None
        self.start_clock = 0.0
        self.elapsed = 0.0

    def begin(self, task_id: int, clock: float) -> None:
        self.task_id = task_id
        self.start_clock = clock
        self.elapsed = 0.0

    def clear(self) -> None:
        self.task_id = None
        self.elapsed = 0.0


class SimRunner:
    """Step-by-step run of one job + scenario.  Drive with `run()` for a full
    run, or `step()` repeatedly (the HTTP service does, to pace wall time);
    `offer()` injects operator actions between ticks, thread-safely."""

    def __init__(
        self,
        job: JobSpec,
        script: ScenarioScript,
        config: SimConfig = SimConfig(),
        solution: AssignmentSolution | None = None,
        references: ReferenceLibrary | None = None,
    ) -> None:
        script.validate_for(job)
        self.job = job
        self.script = script
        self.config = config
        self.solution = solution or solve_assignment(job)
        self.references = references or synthetic_library(job, period=config.tick)
        self.state = make_initial_state(self.solution.l_human, self.solution.l_robot, job)
        self.log = EventLog()
        self.rng = np.random.default_rng(np.random.SeedSequence((script.seed, config.seed)))
        self._tick_index = 0
        self._pending_actions = list(script.sorted_actions())
        self._injected: list[ScriptAction] = []
        self._inject_lock = threading.Lock()
        self._speed = 1.0
        self._human = _AgentTrack()
        self._robot = _AgentTrack()
        self._human_progress = 0.0
        self._monitor: TaskMonitor | None = None
        self._failed_tasks: set[int] = set()
        self._watchdog_sent = False
        self._executions: list[ExecutionRecord] = []
        self._open: dict[str, tuple[int, float]] = {}  # agent -> (task, start)
        self._makespan: float | None = None
        self._finished = False
        self._append(
            EventKind.RUN_STARTED,
            0.0,
            {
                "job": job.name,
                "scenario": script.name,
                "seed": [script.seed, config.seed],
                "rescheduling": config.scheduler.rescheduling,
                "l_human": list(self.solution.l_human),
                "l_robot": list(self.solution.l_robot),
                "objective": self.solution.objective,
                "busy_bound": self.solution.busy_bound,
            },
        )

    # -- event plumbing ----------------------------------------------------

    def _append(self, kind: EventKind, clock: float, payload: dict) -> Event:
        payload = dict(payload)
        payload["state"] = self.state.snapshot()
        return self.log.append(kind, clock, payload)

    @property
    def clock(self) -> float:
        return self._tick_index * self.config.tick

    @property
    def finished(self) -> bool:
        return self._finished

    @property
    def speed(self) -> float:
        return self._speed

    def offer(self, action: ScriptAction) -> None:
        """Queue an externally injected action for the next tick."""
        with self._inject_lock:
            self._injected.append(action)

    # -- per-tick mechanics ------------------------------------------------

    def _robot_duration(self, task_id: int) -> float:
        if task_id == HOMING_TASK_ID:
            return self.config.homing_duration
        return self.job.task(task_id).t_robot

    def _take_due_actions(self, clock: float) -> list[ScriptAction]:
        due: list[ScriptAction] = []
        while self._pending_actions and self._pending_actions[0].at <= clock + 1e-9:
            due.append(self._pending_actions.pop(0))
        with self._inject_lock:
            due.extend(self._injected)
            self._injected.clear()
        return due

    def step(self) -> list[Event]:
        """Advance one tick; returns the events it produced."""
        if self._finished:
            return []
        clock = self.clock
        if clock > self.config.max_time:
            raise ContractViolation(
                f"run exceeded the safety horizon ({self.config.max_time}) — "
                f"scheduling failed to terminate"
            )
        produced: list[Event] = []
        cfg = self.config

        # 1. scripted + injected environment/operator actions
        messages: list[Message] = []
        for action in self._take_due_actions(clock):
            if action.kind == "human-speed":
                self._speed = float(action.factor)  # type: ignore[arg-type]
                produced.append(
                    self._append(EventKind.SPEED_CHANGED, clock, {"factor": self._speed})
                )
            elif action.kind == "robot-failure":
                self._failed_tasks.add(int(action.task_id))  # type: ignore[arg-type]
                produced.append(
                    self._append(
                        EventKind.ROBOT_FAILURE_INJECTED, clock, {"task": action.task_id}
                    )
                )
            elif action.kind == "message":
                messages.append(
                    Message(Sender.OPERATOR, _MESSAGE_VERBS[action.verb], int(action.task_id))
                )
            elif action.kind == "confirm":
                messages.append(
                    Message(Sender.OPERATOR, MessageKind.CONFIRM_DONE, int(action.task_id))
                )

        # 2. ground-truth advance since the previous tick
        dt = cfg.tick if self._tick_index > 0 else 0.0
        t_res: float | None = None
        human_elapsed = 0.0
        truth_done = False
        if self._human.task_id is not None:
            task = self.job.task(self._human.task_id)
            if dt > 0.0:
                self._human.elapsed += dt
                self._human_progress += self._speed * dt / task.t_human
                ref = self.references.get(self._human.task_id)
                assert self._monitor is not None
                if ref is not None:
                    sample = ref.at_phase(min(self._human_progress, 1.0))
                    sample = sample + self.rng.normal(0.0, cfg.jitter_sigma, ref.dims)
                    estimate = self._monitor.observe(sample)
                else:
                    estimate = self._monitor.observe(np.zeros(1))
                t_res = estimate.t_res
            else:
                assert self._monitor is not None
                t_res = self._monitor.estimate.t_res
            human_elapsed = self._human.elapsed
            truth_done = self._human_progress >= 1.0 - 1e-9

        robot_completed = False
        robot_timed_out = False
        if self._robot.task_id is not None:
            if dt > 0.0:
                self._robot.elapsed += dt
            duration = self._robot_duration(self._robot.task_id)
            failed = self._robot.task_id in self._failed_tasks
            robot_completed, timed_out = monitor_robot(
                duration, self._robot.elapsed, failed, cfg.timeout_factor
            )
            if timed_out and not self._watchdog_sent:
                robot_timed_out = True
                self._watchdog_sent = True

        # 3. one scheduling step
        inputs = StepInputs(
            t_res=t_res,
            human_elapsed=human_elapsed,
            human_truth_done=truth_done,
            robot_elapsed=self._robot.elapsed if self._robot.task_id is not None else 0.0,
            robot_completed=robot_completed,
            robot_timed_out=robot_timed_out,
            messages=tuple(messages),
        )
        step_events = scheduler_step(self.state, self.job, inputs, cfg.scheduler)

        # 4. reconcile ground-truth tracks with the post-step state
        for kind, payload in step_events:
            if kind in (EventKind.TASK_COMPLETED, EventKind.TASK_ABORTED, EventKind.TASK_FAILED):
                agent = payload["agent"]
                open_exec = self._open.pop(agent, None)
                if open_exec is not None:
                    task_id, start = open_exec
                    if kind is EventKind.TASK_FAILED:
                        outcome = "failed"
                    elif kind is EventKind.TASK_ABORTED:
                        outcome = "aborted"
                    elif payload.get("aborted"):
                        outcome = "abandoned"
                    else:
                        outcome = "completed"
                    self._executions.append(
                        ExecutionRecord(task_id, agent, start, clock, outcome)
                    )
        for kind, payload in step_events:
            produced.append(self._append(kind, clock, payload))
            if kind is EventKind.TASK_STARTED:
                self._open[payload["agent"]] = (payload["task"], clock)

        if self._human.task_id != self.state.current_human:
            if self.state.current_human is not None:
                self._human.begin(self.state.current_human, clock)
                self._human_progress = 0.0
                task = self.job.task(self.state.current_human)
                self._monitor = TaskMonitor(
                    task_id=task.id,
                    t_human=task.t_human,
                    reference=self.references.get(task.id),
                    sample_period=cfg.tick,
                )
            else:
                self._human.clear()
                self._monitor = None
        if self._robot.task_id != self.state.current_robot:
            if self.state.current_robot is not None:
                self._robot.begin(self.state.current_robot, clock)
            else:
                self._robot.clear()
            self._watchdog_sent = False

        # 5. completion bookkeeping
        if self._makespan is None and self.state.done >= frozenset(self.job.ids):
            self._makespan = clock
        if (
            self._makespan is not None
            and self.state.current_robot is None
            and HOMING_TASK_ID not in self.state.l_robot
            and not self._finished
        ):
            self._finished = True
            metrics = self._compute_metrics()
            produced.append(
                self._append(
                    EventKind.RUN_COMPLETED,
                    clock,
                    {"makespan": self._makespan, "metrics": metrics.to_dict()},
                )
            )
        self._tick_index += 1
        return produced

    def _compute_metrics(self) -> RunMetrics:
        def agent_stats(agent: str) -> tuple[float, float]:
            recs = [r for r in self._executions if r.agent == agent]
            busy = sum(r.duration for r in recs)
            last_finish = max((r.end for r in recs), default=0.0)
            return busy, max(0.0, last_finish - busy)

        human_busy, human_idle = agent_stats("human")
        robot_busy, robot_idle = agent_stats("robot")
        return RunMetrics(
            makespan=self._makespan if self._makespan is not None else self.clock,
            human_busy=human_busy,
            human_idle=human_idle,
            robot_busy=robot_busy,
            robot_idle=robot_idle,
            reschedule_count=len(self.log.of_kind(EventKind.RESCHEDULE_APPLIED)),
            messages_accepted=len(self.log.of_kind(EventKind.MESSAGE_RECEIVED)),
            messages_rejected=len(self.log.of_kind(EventKind.MESSAGE_REJECTED)),
        )

    def run(self) -> RunResult:
        while not self._finished:
            self.step()
        return self.result()

    def result(self) -> RunResult:
        if not self._finished:
            raise ContractViolation("run is still in progress")
        return RunResult(
            job_name=self.job.name,
            scenario_name=self.script.name,
            rescheduling=self.config.scheduler.rescheduling,
            makespan=self._makespan if self._makespan is not None else self.clock,
            metrics=self._compute_metrics(),
            log=self.log,
            final_state=self.state,
            executions=tuple(self._executions),
        )


def run_scenario(
    job: JobSpec,
    script: ScenarioScript,
    config: SimConfig = SimConfig(),
    references: ReferenceLibrary | None = None,
) -> RunResult:
    return SimRunner(job, script, config, references=references).run()


def baseline_run(
    job: JobSpec,
    script: ScenarioScript,
    config: SimConfig = SimConfig(),
    references: ReferenceLibrary | None = None,
) -> RunResult:
    """Same scenario with queue refilling disabled (remaining-time holds stay)."""
    cfg = replace(config, scheduler=replace(config.scheduler, rescheduling=False))
    return SimRunner(job, script, cfg, references=references).run()
