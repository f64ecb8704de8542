"""Reactive robot-queue scheduling around a monitored human co-worker.

State model: each agent owns an ordered task list; the task an agent is
executing stays *in* its list (tracked by `current_human` / `current_robot`)
and is removed only when the execution ends.  Fetching the next task always
takes the list head, and every insertion pushes at the head, so operator
handovers jump the queue.

Each simulation tick runs `scheduler_step`, which applies, in order:

1.  Monitor verdicts — the human's task ends when the progress monitor says
    nothing remains (or ground truth / an operator confirmation forces it);
    the robot's task ends when its controller reports completion.
2.  Communication — operator messages, then robot-initiated handover
    requests, with staleness/executability guards.  A robot task taken away
    mid-execution aborts it and queues a short homing retraction (task id 0).
3.  Execution end handling — finished tasks pop from their list into the
    done set; force-ended human work counts as done-but-aborted, while tasks
    that migrated to the other agent are not marked done (they re-run there).
4.  Queue refill — only when the human is measurably behind nominal pace
    (estimated remaining time exceeds nominal remaining by more than the
    delay threshold), the robot's pending tasks are reordered so that a
    maximum-duration subset fitting inside the human's remaining-time window
    runs first.  On-pace runs are left untouched, so a nominal execution
    reproduces the offline schedule exactly.
5.  Dispatch — the human always starts its head task; the robot starts its
    head unless a closed preparatory gate or the remaining-time window holds
    it back (homing is always dispatchable).

The preparatory gate releases robot work on ordinary tasks only after every
task flagged preparatory is done, whoever did it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._kernels import knapsack_select
from .errors import ContractViolation
from .events import EventKind
from .job import HOMING_TASK_ID, JobSpec, TaskList, delete, push

#: Remaining-time threshold under which the monitor declares the human done.
EPS_DONE = 1e-6
#: Minimum change in estimated remaining time before re-running the refill.
EPS_RESCHEDULE = 0.02
#: The human must lag nominal pace by more than this before the robot reacts.
DELAY_THRESHOLD = 0.05
#: Slack applied when checking whether a task fits the remaining-time window.
WINDOW_TOL = 1e-9
#: A failed robot task is handed over after this multiple of its nominal time.
DEFAULT_TIMEOUT_FACTOR = 2.0
#: Normalized duration of the robot's homing retraction (task id 0).
DEFAULT_HOMING_DURATION = 0.1


class Sender(str, Enum):
    OPERATOR = "operator"
    ROBOT = "robot"


class MessageKind(str, Enum):
    #: Operator moves a human-owned task to the robot.
    DELEGATE_TO_ROBOT = "delegate"
    #: Operator moves a robot-owned task to the human (pre-empting the human).
    REASSIGN_TO_HUMAN = "reassign"
    #: Robot asks the human to take over a task it cannot finish.
    HANDOVER_REQUEST = "handover-request"
    #: Operator asserts the human's current task is finished.
    CONFIRM_DONE = "confirm-done"


_OPERATOR_KINDS = {
    MessageKind.DELEGATE_TO_ROBOT,
    MessageKind.REASSIGN_TO_HUMAN,
    MessageKind.CONFIRM_DONE,
}


@dataclass(frozen=True, slots=True)
class Message:
    sender: Sender
    kind: MessageKind
    task_id: int

    def __post_init__(self) -> None:
        if self.kind in _OPERATOR_KINDS:
            if self.sender is not Sender.OPERATOR:
                raise ContractViolation(f"{self.kind.value} must come from the operator")
        elif self.sender is not Sender.ROBOT:
            raise ContractViolation(f"{self.kind.value} must come from the robot")


@dataclass(frozen=True, slots=True)
class SchedulerConfig:
    eps_done: float = EPS_DONE
    eps_reschedule: float = EPS_RESCHEDULE
    delay_threshold: float = DELAY_THRESHOLD
    rescheduling: bool = True  # False = baseline: window holds but never reorders


@dataclass(slots=True)
class SchedulerState:
    l_human: TaskList
    l_robot: TaskList
    current_human: int | None = None
    current_robot: int | None = None
    done: frozenset[int] = frozenset()
    failed: frozenset[int] = frozenset()
    aborted: frozenset[int] = frozenset()
    gate_open: bool = False
    held_reason: str | None = None
    last_reschedule_t_res: float | None = None

    def snapshot(self) -> dict:
        return {
            "l_human": list(self.l_human),
            "l_robot": list(self.l_robot),
            "current_human": self.current_human,
            "current_robot": self.current_robot,
            "done": sorted(self.done),
            "failed": sorted(self.failed),
            "aborted": sorted(self.aborted),
            "gate_open": self.gate_open,
        }


@dataclass(frozen=True, slots=True)
class StepInputs:
    """Signals gathered by the execution environment before one step.

    `t_res` is the monitor's estimated remaining time on the human's current
    task (None when the human is idle).  `human_truth_done` short-circuits
    the estimate when actual completion is known.  `robot_completed` /
    `robot_timed_out` are the robot controller verdicts for its current task.
    Messages must list operator messages before robot-initiated ones.
    """

    t_res: float | None = None
    human_elapsed: float = 0.0
    human_truth_done: bool = False
    robot_elapsed: float = 0.0
    robot_completed: bool = False
    robot_timed_out: bool = False
    messages: tuple[Message, ...] = ()


@dataclass(frozen=True, slots=True)
class RescheduleResult:
    new_l_robot: TaskList
    budget: float
    candidates: TaskList
    selected: TaskList
    selected_total: float


def monitor_robot(
    duration: float, elapsed: float, failed: bool, timeout_factor: float = DEFAULT_TIMEOUT_FACTOR
) -> tuple[bool, bool]:
    """Robot controller verdict: (completed, watchdog timeout fired).

    A scripted-failed task never completes; instead, once the robot has spent
    `timeout_factor` times the nominal duration on it, the watchdog asks for
    a handover.
    """
    if failed:
        return False, elapsed >= timeout_factor * duration - 1e-9
    return elapsed >= duration - 1e-9, False


def knapsack_fill(
    candidates: Iterable[int], durations: Mapping[int, float], budget: float
) -> tuple[TaskList, float]:
    """Subset of `candidates` maximizing total duration within `budget`.

    Candidates are considered in ascending id order and ties go to the
    lexicographically smallest id set; the selection is returned ascending.
    """
    ids = sorted(candidates)
    arr = np.array([durations[t] for t in ids], dtype=np.float64)
    total, mask = knapsack_select(arr, budget)
    return tuple(t for t, bit in zip(ids, mask) if bit), float(total)


def reschedule(
    l_robot: TaskList,
    current_robot: int | None,
    t_res: float,
    robot_remaining: float,
    robot_durations: Mapping[int, float],
) -> RescheduleResult | None:
    """Reorder the robot's pending tasks to exploit the human's remaining time.

    The budget is the human's estimated remaining time minus what the robot
    still needs on its current task; pending tasks (current and homing
    excluded) filling that budget best move to the front, keeping their
    relative order, with the rest after them.  Returns None when there is no
    positive budget or nothing to reorder.
    """
    budget = t_res - robot_remaining
    if budget <= 0.0:
        return None
    if current_robot is not None and current_robot not in l_robot:
        raise ContractViolation("the robot's current task must still be in its queue")
    candidates = tuple(t for t in l_robot if t != current_robot and t != HOMING_TASK_ID)
    if not candidates:
        return None
    if HOMING_TASK_ID in l_robot:
        raise ContractViolation("refill must not run while a homing retraction is pending")
    selected, total = knapsack_fill(candidates, robot_durations, budget)
    sel_set = set(selected)
    head: list[int] = [current_robot] if current_robot is not None else []
    new_order = (
        *head,
        *(t for t in candidates if t in sel_set),
        *(t for t in candidates if t not in sel_set),
    )
    return RescheduleResult(
        new_l_robot=new_order,
        budget=budget,
        candidates=candidates,
        selected=selected,
        selected_total=total,
    )


def make_initial_state(l_human: Sequence[int], l_robot: Sequence[int], job: JobSpec) -> SchedulerState:
    prep = job.preparatory_ids
    return SchedulerState(
        l_human=tuple(l_human),
        l_robot=tuple(l_robot),
        gate_open=not prep,
    )


StepEvents = list[tuple[EventKind, dict]]


def _push_homing(state: SchedulerState, events: StepEvents) -> None:
    if HOMING_TASK_ID in state.l_robot or state.current_robot == HOMING_TASK_ID:
        raise ContractViolation("at most one homing retraction may be pending")
    state.l_robot = push(HOMING_TASK_ID, state.l_robot)
    events.append((EventKind.HOMING_INSERTED, {"agent": "robot"}))


def scheduler_step(
    state: SchedulerState,
    job: JobSpec,
    inputs: StepInputs,
    config: SchedulerConfig = SchedulerConfig(),
) -> StepEvents:
    """Advance the scheduling state by one tick.  Mutates `state` and returns
    the events the step produced, in order."""
    events: StepEvents = []
    known_ids = set(job.ids)

    # --- effective remaining time (operator confirmation short-circuits) ----
    t_res = inputs.t_res
    for msg in inputs.messages:
        if (
            msg.kind is MessageKind.CONFIRM_DONE
            and state.current_human is not None
            and msg.task_id == state.current_human
        ):
            t_res = 0.0

    # --- phase 1: monitor verdicts -----------------------------------------
    human_task_at_input = state.current_human
    end_human = state.current_human is not None and (
        inputs.human_truth_done or (t_res is not None and t_res <= config.eps_done)
    )
    human_forced = False
    end_robot = state.current_robot is not None and inputs.robot_completed
    robot_forced_reason: str | None = None

    delta: float | None = None
    if state.current_human is not None and t_res is not None:
        nominal_remaining = max(
            job.task(state.current_human).t_human - inputs.human_elapsed, 0.0
        )
        delta = t_res - nominal_remaining

    # --- phase 2: communication --------------------------------------------
    messages = list(inputs.messages)
    if (
        inputs.robot_timed_out
        and state.current_robot is not None
        and state.current_robot != HOMING_TASK_ID
    ):
        messages.append(
            Message(Sender.ROBOT, MessageKind.HANDOVER_REQUEST, state.current_robot)
        )

    for msg in messages:
        info = {"sender": msg.sender.value, "kind": msg.kind.value, "task": msg.task_id}

        def reject(reason: str) -> None:
            events.append((EventKind.MESSAGE_REJECTED, {**info, "reason": reason}))

        if msg.kind is MessageKind.CONFIRM_DONE:
            if state.current_human is not None and msg.task_id == state.current_human:
                events.append((EventKind.MESSAGE_RECEIVED, info))
            else:
                reject("not-current")
            continue

        if msg.task_id not in known_ids:
            reject("unknown-task")
            continue
        if msg.task_id in state.done:
            reject("stale-done")
            continue

        if msg.kind is MessageKind.DELEGATE_TO_ROBOT:
            task = job.task(msg.task_id)
            if not task.robot_executable:
                reject("not-robot-executable")
                continue
            if msg.task_id not in state.l_human:
                reject("not-human-owned")
                continue
            events.append((EventKind.MESSAGE_RECEIVED, info))
            state.l_human = delete(msg.task_id, state.l_human)
            state.l_robot = push(msg.task_id, state.l_robot)
            if msg.task_id == state.current_human:
                # The human abandons it mid-way; the robot will run it afresh.
                human_forced = True
        elif msg.kind is MessageKind.REASSIGN_TO_HUMAN:
            if msg.task_id not in state.l_robot:
                reject("not-robot-owned")
                continue
            events.append((EventKind.MESSAGE_RECEIVED, info))
            state.l_robot = delete(msg.task_id, state.l_robot)
            state.l_human = push(msg.task_id, state.l_human)
            if state.current_human is not None:
                # Operator priority: the human drops current work and switches.
                human_forced = True
            if msg.task_id == state.current_robot:
                robot_forced_reason = "reassigned"
                _push_homing(state, events)
        elif msg.kind is MessageKind.HANDOVER_REQUEST:
            if msg.task_id != state.current_robot or msg.task_id not in state.l_robot:
                reject("stale-not-current")
                continue
            task = job.task(msg.task_id)
            state.l_robot = delete(msg.task_id, state.l_robot)
            if task.human_executable:
                events.append((EventKind.MESSAGE_RECEIVED, info))
                state.l_human = push(msg.task_id, state.l_human)
                robot_forced_reason = "timeout-handover"
            else:
                # Nobody can take it: record a terminal failure and move on.
                reject("not-human-executable")
                state.done = state.done | {msg.task_id}
                state.failed = state.failed | {msg.task_id}
                events.append(
                    (
                        EventKind.TASK_FAILED,
                        {"task": msg.task_id, "agent": "robot", "reason": "given-up"},
                    )
                )
                robot_forced_reason = "given-up"
            _push_homing(state, events)

    # --- phase 3: execution end handling -----------------------------------
    if (end_human or human_forced) and state.current_human is not None:
        t = state.current_human
        if t in state.l_human:
            state.l_human = delete(t, state.l_human)
            state.done = state.done | {t}
            payload = {"task": t, "agent": "human", "aborted": not end_human}
            if not end_human:
                state.aborted = state.aborted | {t}
            events.append((EventKind.TASK_COMPLETED, payload))
        else:
            events.append((EventKind.TASK_ABORTED, {"task": t, "agent": "human"}))
        state.current_human = None
        state.last_reschedule_t_res = None
        t_res = None
        delta = None

    if (end_robot or robot_forced_reason is not None) and state.current_robot is not None:
        t = state.current_robot
        if end_robot and robot_forced_reason is None:
            if t == HOMING_TASK_ID:
                state.l_robot = delete(t, state.l_robot)
                events.append((EventKind.TASK_COMPLETED, {"task": t, "agent": "robot", "aborted": False}))
            elif t in state.l_robot:
                state.l_robot = delete(t, state.l_robot)
                state.done = state.done | {t}
                events.append((EventKind.TASK_COMPLETED, {"task": t, "agent": "robot", "aborted": False}))
            else:
                events.append((EventKind.TASK_ABORTED, {"task": t, "agent": "robot"}))
        else:
            events.append(
                (
                    EventKind.TASK_ABORTED,
                    {"task": t, "agent": "robot", "reason": robot_forced_reason or "forced"},
                )
            )
        state.current_robot = None

    # --- gate --------------------------------------------------------------
    if not state.gate_open and state.done >= frozenset(job.preparatory_ids):
        state.gate_open = True
        events.append((EventKind.GATE_OPENED, {"preparatory": sorted(job.preparatory_ids)}))

    # --- phase 4: delayed-human queue refill -------------------------------
    window_active = (
        state.current_human is not None
        and state.current_human == human_task_at_input
        and t_res is not None
        and delta is not None
        and delta > config.delay_threshold
    )
    if (
        config.rescheduling
        and window_active
        and state.gate_open
        and HOMING_TASK_ID not in state.l_robot
        and state.current_robot != HOMING_TASK_ID
    ):
        boundary_need = state.current_robot is None and any(
            t != HOMING_TASK_ID for t in state.l_robot
        )
        last = state.last_reschedule_t_res
        triggered = boundary_need or last is None or abs(t_res - last) > config.eps_reschedule
        if triggered:
            state.last_reschedule_t_res = t_res
            if state.current_robot is None:
                robot_remaining = 0.0
            else:
                robot_remaining = max(
                    job.task(state.current_robot).t_robot - inputs.robot_elapsed, 0.0
                )
            durations = {t.id: t.t_robot for t in job.tasks}
            result = reschedule(
                state.l_robot, state.current_robot, t_res, robot_remaining, durations
            )
            if result is not None and result.new_l_robot != state.l_robot:
                old = list(state.l_robot)
                state.l_robot = result.new_l_robot
                events.append(
                    (
                        EventKind.RESCHEDULE_APPLIED,
                        {
                            "t_res": t_res,
                            "robot_remaining": robot_remaining,
                            "budget": result.budget,
                            "candidates": list(result.candidates),
                            "selected": list(result.selected),
                            "selected_total": result.selected_total,
                            "old_order": old,
                            "new_order": list(result.new_l_robot),
                        },
                    )
                )

    # --- phase 5: dispatch -------------------------------------------------
    if state.current_human is None and state.l_human:
        head = state.l_human[0]
        if head == HOMING_TASK_ID:
            raise ContractViolation("homing retraction can never sit in the human queue")
        state.current_human = head
        events.append((EventKind.TASK_STARTED, {"task": head, "agent": "human"}))

    if state.current_robot is None and state.l_robot:
        head = state.l_robot[0]
        hold_reason: str | None = None
        candidate: int | None = head
        if head != HOMING_TASK_ID:
            if not state.gate_open and not job.task(head).preparatory:
                candidate = next(
                    (
                        t
                        for t in state.l_robot
                        if t != HOMING_TASK_ID and job.task(t).preparatory
                    ),
                    None,
                )
                if candidate is None:
                    hold_reason = "gate"
            if (
                candidate is not None
                and window_active
                and job.task(candidate).t_robot > t_res + WINDOW_TOL
            ):
                hold_reason = "window"
                candidate = None
        if hold_reason is None and candidate is not None:
            state.current_robot = candidate
            state.held_reason = None
            events.append((EventKind.TASK_STARTED, {"task": candidate, "agent": "robot"}))
        elif hold_reason is not None and state.held_reason != hold_reason:
            state.held_reason = hold_reason
            events.append((EventKind.ROBOT_HELD, {"reason": hold_reason}))
    elif state.current_robot is not None:
        state.held_reason = None

    return events


def unfinished_ids(state: SchedulerState, job: JobSpec) -> frozenset[int]:
    return frozenset(job.ids) - state.done
