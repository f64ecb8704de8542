"""Job model for a shared human-robot assembly cell.

A job is a flat set of independent tasks.  Every task can in principle be
executed by either agent; per-agent weights encode how well suited an agent
is and per-agent durations how long it would take.  Durations are stored
normalized by the job's normalization base (the longest nominal duration,
in seconds), so 1.0 means "as long as the longest task".

Task lists are plain tuples of task ids.  The scheduler manipulates them
exclusively through the small set of primitives at the bottom of this
module (next_task / split / push / delete / concat), which keep the
no-duplicates invariant.
"""

import shlex
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import ContractViolation, JobFileError

__all__ = [
    "HOMING_TASK_ID",
    "AgentId",
    "JobSpec",
    "TaskList",
    "TaskSpec",
    "concat",
    "delete",
    "load_job",
    "next_task",
    "parse_job",
    "push",
    "split",
]

# Sentinel id for the robot's homing move; never part of a job (ids are >= 1).
HOMING_TASK_ID = 0

TaskList = tuple[int, ...]


class AgentId(str, Enum):
    HUMAN = "human"
    ROBOT = "robot"

    def other(self) -> "AgentId":
        return AgentId.ROBOT if self is AgentId.HUMAN else AgentId.HUMAN


@dataclass(frozen=True, slots=True)
class TaskSpec:
    """One task of a job, with per-agent weights and normalized durations."""

    id: int
    label: str
    w_robot: float
    t_robot: float
    w_human: float
    t_human: float
    robot_executable: bool = True
    human_executable: bool = True
    preparatory: bool = False

    def __post_init__(self) -> None:
        if self.id < 1:
            raise ValueError(f"task id must be >= 1, got {self.id}")
        if not self.label:
            raise ValueError(f"task {self.id}: empty label")
        for name in ("w_robot", "t_robot", "w_human", "t_human"):
            value = getattr(self, name)
            if not value > 0.0:
                raise ValueError(f"task {self.id}: {name} must be > 0, got {value}")
        if not (self.robot_executable or self.human_executable):
            raise ValueError(f"task {self.id}: no agent can execute it")

    def weight(self, agent: AgentId) -> float:
        return self.w_human if agent is AgentId.HUMAN else self.w_robot

    def duration(self, agent: AgentId) -> float:
        return self.t_human if agent is AgentId.HUMAN else self.t_robot


@dataclass(frozen=True, slots=True)
class JobSpec:
    """A named job: dense task ids 1..N plus the normalization base in seconds."""

    name: str
    normalization_base: float
    tasks: tuple[TaskSpec, ...]

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("job name must be non-empty")
        if not self.normalization_base > 0.0:
            raise ValueError(f"normalization base must be > 0, got {self.normalization_base}")
        if not self.tasks:
            raise ValueError("job has no tasks")
        ids = [t.id for t in self.tasks]
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError(f"task ids must be dense 1..N in order, got {ids}")

    def __len__(self) -> int:
        return len(self.tasks)

    @property
    def ids(self) -> TaskList:
        return tuple(t.id for t in self.tasks)

    def task(self, task_id: int) -> TaskSpec:
        if not 1 <= task_id <= len(self.tasks):
            raise KeyError(f"no task {task_id} in job {self.name!r}")
        return self.tasks[task_id - 1]

    @property
    def preparatory_ids(self) -> TaskList:
        return tuple(t.id for t in self.tasks if t.preparatory)


def _parse_bool(token: str, where: str) -> bool:
    low = token.lower()
    if low in ("yes", "y", "true", "1"):
        return True
    if low in ("no", "n", "false", "0"):
        return False
    raise JobFileError(f"{where}: expected yes/no, got {token!r}")


def parse_job(text: str, name_hint: str = "job") -> JobSpec:
    """Parse the plain-text job format.

    Lines (blank lines and ``#`` comments are ignored)::

        job <name>
        base <normalization base, seconds>
        task <id> <label> <w_robot> <t_robot[s]> <w_human> <t_human[s]> \
            <robot yes/no> <human yes/no> [prep]

    Raw durations are in seconds and are divided by the base on load.
    """
    name = name_hint
    base = None
    tasks = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            fields = shlex.split(line)
        except ValueError as exc:
            raise JobFileError(f"line {lineno}: {exc}") from exc
        kind, args = fields[0], fields[1:]
        where = f"line {lineno}"
        if kind == "job":
            if len(args) != 1:
                raise JobFileError(f"{where}: 'job' takes exactly one name")
            name = args[0]
        elif kind == "base":
            if len(args) != 1:
                raise JobFileError(f"{where}: 'base' takes exactly one value")
            try:
                base = float(args[0])
            except ValueError as exc:
                raise JobFileError(f"{where}: bad base {args[0]!r}") from exc
        elif kind == "task":
            if len(args) not in (8, 9):
                raise JobFileError(f"{where}: 'task' takes 8 or 9 fields, got {len(args)}")
            if len(args) == 9 and args[8] != "prep":
                raise JobFileError(f"{where}: trailing flag must be 'prep', got {args[8]!r}")
            try:
                task_id = int(args[0])
                numbers = [float(v) for v in args[2:6]]
            except ValueError as exc:
                raise JobFileError(f"{where}: {exc}") from exc
            tasks.append(
                (
                    where,
                    task_id,
                    args[1],
                    numbers,
                    _parse_bool(args[6], where),
                    _parse_bool(args[7], where),
                    len(args) == 9,
                )
            )
        else:
            raise JobFileError(f"{where}: unknown directive {kind!r}")
    if base is None:
        raise JobFileError("missing 'base' line")
    if not base > 0.0:
        raise JobFileError(f"base must be > 0, got {base}")
    specs = []
    for where, task_id, label, numbers, ex_robot, ex_human, prep in tasks:
        w_r, t_r, w_h, t_h = numbers
        try:
            specs.append(
                TaskSpec(
                    id=task_id,
                    label=label,
                    w_robot=w_r,
                    t_robot=t_r / base,
                    w_human=w_h,
                    t_human=t_h / base,
                    robot_executable=ex_robot,
                    human_executable=ex_human,
                    preparatory=prep,
                )
            )
        except ValueError as exc:
            raise JobFileError(f"{where}: {exc}") from exc
    try:
        return JobSpec(name=name, normalization_base=base, tasks=tuple(specs))
    except ValueError as exc:
        raise JobFileError(str(exc)) from exc


def load_job(path: str | Path) -> JobSpec:
    """Load a job description file; see `parse_job` for the format."""
    path = Path(path)
    return parse_job(path.read_text(), name_hint=path.stem)


# ---------------------------------------------------------------------------
# Task list primitives.  A task list is an ordered tuple of ids without
# duplicates; None stands for "no task".

def next_task(t: int | None, l: TaskList) -> int | None:
    """Successor of t in l; the first element when t is None; None at the end."""
    if t is None:
        return l[0] if l else None
    try:
        i = l.index(t)
    except ValueError:
        raise ContractViolation(f"next_task: task {t} not in list {l}") from None
    return l[i + 1] if i + 1 < len(l) else None


def split(t: int, l: TaskList) -> tuple[TaskList, TaskList]:
    """Split l at t; the first part ends with (and contains) t."""
    try:
        i = l.index(t)
    except ValueError:
        raise ContractViolation(f"split: task {t} not in list {l}") from None
    return l[: i + 1], l[i + 1 :]


def push(t: int, l: TaskList) -> TaskList:
    """Insert t at the head of l."""
    if t in l:
        raise ContractViolation(f"push: task {t} already in list {l}")
    return (t, *l)


def delete(t: int, l: TaskList) -> TaskList:
    """Remove t from l; removing an absent task is a no-op."""
    return tuple(x for x in l if x != t)


def concat(first: TaskList, second: TaskList, third: TaskList) -> TaskList:
    """Join three disjoint task lists in order."""
    joined = (*first, *second, *third)
    if len(set(joined)) != len(joined):
        raise ContractViolation(f"concat: lists overlap: {first} {second} {third}")
    return joined
