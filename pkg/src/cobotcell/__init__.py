"""cobotcell: task assignment and reactive scheduling for a shared human/robot work cell.

The package splits into an offline layer — an exact branch-and-bound assignment
of tasks to the human or the robot balancing agent effort against completion
time — and an online layer that watches execution, estimates how much time the
human still needs on their current task, and reshuffles / refills the robot's
queue (plus operator-driven task handovers) when reality drifts from the plan.

Public modules:
    job         -- task/job model, job-file parsing, ordered-task-list primitives.
    assignment  -- exact two-agent assignment solver and nominal schedules.
    monitor     -- progress estimation from motion streams (open-end DTW).
    scheduler   -- reactive robot-list rescheduling, handover messages, robot watchdog.
    sim         -- deterministic tick-driven execution of a job under a scenario script.
    events      -- append-only structured run log (JSONL).
    api         -- HTTP/SSE service exposing live runs to remote consoles.
    cli         -- `cobotcell` command-line entry points.
"""

__version__ = "0.1.0"

from .errors import CapacityError, ContractViolation, JobFileError, ScenarioError
from .job import HOMING_TASK_ID, AgentId, JobSpec, TaskSpec, load_job, parse_job

__all__ = [
    "__version__",
    "AgentId",
    "CapacityError",
    "ContractViolation",
    "HOMING_TASK_ID",
    "JobFileError",
    "JobSpec",
    "ScenarioError",
    "TaskSpec",
    "load_job",
    "parse_job",
]
