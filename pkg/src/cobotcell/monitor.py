"""Human-progress estimation from streamed motion samples.

A task's reference recording is a fixed-rate multivariate time series of one
nominal execution.  While the human works, each incoming motion sample extends
an open-end DTW accumulated-cost table against the reference; the cheapest
match endpoint says how far through the reference the observed prefix reaches,
and that fraction times the task's nominal human duration gives the remaining
time `t_res` the reactive scheduler consumes.

Per execution the completion estimate is clamped to be non-decreasing (a
running max), so noise can delay but never rewind apparent progress.  Without
a reference recording the monitor degrades to a wall-clock ramp estimate and
flags it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sin
from pathlib import Path

import numpy as np

from ._kernels import dtw_update_row
from .errors import JobFileError
from .job import JobSpec


@dataclass(frozen=True, eq=False, slots=True)
class TimeSeries:
    """Fixed-rate multivariate series: `values` has shape (samples, dims)."""

    values: np.ndarray
    sample_period: float

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"time series needs shape (samples>=1, dims>=1), got {arr.shape}")
        if not (self.sample_period > 0.0):
            raise ValueError(f"sample period must be positive, got {self.sample_period}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.shape[0])

    @property
    def dims(self) -> int:
        return int(self.values.shape[1])

    def at_phase(self, phase: float) -> np.ndarray:
        """Linear interpolation at fractional position `phase` in [0, 1]."""
        p = min(max(phase, 0.0), 1.0)
        pos = p * (len(self) - 1)
        lo = int(pos)
        hi = min(lo + 1, len(self) - 1)
        frac = pos - lo
        return (1.0 - frac) * self.values[lo] + frac * self.values[hi]


def open_end_completion(cost_row: np.ndarray) -> float:
    """Fraction of the reference covered by the best open-end match.

    The raw accumulated final row is scanned for its minimum (first index on
    ties); matching the reference up through index j means j+1 of its samples
    are explained, hence completion (j + 1) / len(reference).
    """
    m = int(cost_row.shape[0])
    return (int(np.argmin(cost_row)) + 1) / m


def estimate_remaining(completion: float, t_human: float) -> float:
    """Remaining execution time implied by a completion fraction."""
    return max(0.0, (1.0 - completion) * t_human)


@dataclass(frozen=True, slots=True)
class ProgressEstimate:
    """One monitor verdict: completion in [0, 1], remaining time, and whether
    the estimate came from the degraded no-reference fallback."""

    completion: float
    t_res: float
    degraded: bool = False


@dataclass(slots=True)
class TaskMonitor:
    """Streaming progress estimator for one execution of one task.

    Feed each motion sample to `observe`; completion is clamped non-decreasing
    across the execution.  Create a fresh monitor (or call `reset`) whenever
    the task starts over, so the clamp does not leak between executions.
    """

    task_id: int
    t_human: float
    reference: TimeSeries | None
    sample_period: float
    _row: np.ndarray | None = field(default=None, init=False, repr=False)
    _n_observed: int = field(default=0, init=False)
    _best_completion: float = field(default=0.0, init=False)

    def __post_init__(self) -> None:
        if not (self.t_human > 0.0):
            raise ValueError(f"nominal human duration must be positive, got {self.t_human}")
        if not (self.sample_period > 0.0):
            raise ValueError(f"sample period must be positive, got {self.sample_period}")

    def reset(self) -> None:
        self._row = None
        self._n_observed = 0
        self._best_completion = 0.0

    @property
    def n_observed(self) -> int:
        return self._n_observed

    @property
    def estimate(self) -> ProgressEstimate:
        """Current verdict without consuming a new sample (0.0 before any)."""
        c = self._best_completion
        return ProgressEstimate(
            completion=c,
            t_res=estimate_remaining(c, self.t_human),
            degraded=self.reference is None,
        )

    def observe(self, sample: np.ndarray) -> ProgressEstimate:
        self._n_observed += 1
        if self.reference is None:
            raw = min(self._n_observed * self.sample_period / self.t_human, 1.0)
        else:
            self._row = dtw_update_row(self._row, sample, self.reference.values)
            raw = open_end_completion(self._row)
        if raw > self._best_completion:
            self._best_completion = raw
        return self.estimate


class ReferenceLibrary:
    """Task id -> nominal-execution recording, with a plain-text disk format.

    File format, repeated per task::

        ref <task_id> samples <n> dims <d> period <sample_period>
        <v1> <v2> ... <vd>        (n rows)
    """

    def __init__(self, references: dict[int, TimeSeries] | None = None) -> None:
        self._refs: dict[int, TimeSeries] = dict(references or {})

    def __len__(self) -> int:
        return len(self._refs)

    def __contains__(self, task_id: int) -> bool:
        return task_id in self._refs

    @property
    def task_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._refs))

    def get(self, task_id: int) -> TimeSeries | None:
        return self._refs.get(task_id)

    def add(self, task_id: int, series: TimeSeries) -> None:
        self._refs[task_id] = series

    def save(self, path: str | Path) -> None:
        lines: list[str] = []
        for task_id in self.task_ids:
            ts = self._refs[task_id]
            lines.append(
                f"ref {task_id} samples {len(ts)} dims {ts.dims} period {ts.sample_period!r}"
            )
            for row in ts.values:
                lines.append(" ".join(repr(float(v)) for v in row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ReferenceLibrary":
        refs: dict[int, TimeSeries] = {}
        text = Path(path).read_text(encoding="utf-8")
        lines = [ln.strip() for ln in text.splitlines()]
        i = 0
        while i < len(lines):
            line = lines[i]
            i += 1
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if (
                len(parts) != 8
                or parts[0] != "ref"
                or parts[2] != "samples"
                or parts[4] != "dims"
                or parts[6] != "period"
            ):
                raise JobFileError(f"{path}: bad reference header: {line!r}")
            try:
                task_id = int(parts[1])
                n = int(parts[3])
                d = int(parts[5])
                period = float(parts[7])
            except ValueError as exc:
                raise JobFileError(f"{path}: bad reference header: {line!r}") from exc
            if task_id in refs:
                raise JobFileError(f"{path}: duplicate reference for task {task_id}")
            rows = np.empty((n, d), dtype=np.float64)
            for r in range(n):
                if i >= len(lines):
                    raise JobFileError(f"{path}: truncated samples for task {task_id}")
                vals = lines[i].split()
                i += 1
                if len(vals) != d:
                    raise JobFileError(
                        f"{path}: task {task_id} row {r} has {len(vals)} values, expected {d}"
                    )
                try:
                    rows[r] = [float(v) for v in vals]
                except ValueError as exc:
                    raise JobFileError(f"{path}: task {task_id} row {r} not numeric") from exc
            refs[task_id] = TimeSeries(values=rows, sample_period=period)
        return cls(refs)


def synthetic_library(job: JobSpec, period: float = 0.01, dims: int = 6) -> ReferenceLibrary:
    """Deterministic smooth per-task recordings for simulation and testing.

    Each human-executable task gets a bundle of phase-locked sinusoid channels
    whose frequencies/phases/amplitudes derive from the task id alone, sampled
    every `period` across the task's nominal human duration.
    """
    refs: dict[int, TimeSeries] = {}
    for task in job.tasks:
        if not task.human_executable:
            continue
        m = max(2, int(round(task.t_human / period)) + 1)
        rows = np.empty((m, dims), dtype=np.float64)
        for j in range(m):
            phase = j / (m - 1)
            for k in range(dims):
                freq = 1.0 + 0.5 * ((task.id * 7 + k * 3) % 5)
                shift = 0.61 * task.id + 0.37 * k
                amp = 0.5 + 0.25 * ((task.id + k) % 3)
                rows[j, k] = amp * sin(2.0 * pi * freq * phase + shift)
        refs[task.id] = TimeSeries(values=rows, sample_period=period)
    return ReferenceLibrary(refs)
