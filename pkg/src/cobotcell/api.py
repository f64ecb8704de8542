"""HTTP/SSE service exposing live runs to remote consoles.

One run is active at a time.  A background thread advances the simulation,
optionally paced against wall time; consoles follow along over a server-sent
event stream whose payloads are exactly the run's log events (each carrying a
full post-state snapshot), so a client can join or reconnect at any sequence
number and rebuild state from the stream alone.

Endpoints:
    GET  /state                     current run status + scheduling snapshot
    POST /command                   {"kind": "start-run" | "pause" | "resume" |
                                     "delegate" | "reassign" | "confirm-done" |
                                     "set-human-speed", ...}
    GET  /events?from_sequence=k    SSE stream of log events with seq >= k
    GET  /log                       current/last run's full log (JSONL)
    GET/POST /jobs, /scenarios      registry of loadable jobs and scenarios
"""

from __future__ import annotations

import asyncio
import threading
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import JobFileError, ScenarioError
from .events import EventLog
from .job import JobSpec, load_job, parse_job
from .scheduler import SchedulerConfig
from .sim import (
    ScenarioScript,
    ScriptAction,
    SimConfig,
    SimRunner,
    load_scenario,
    parse_scenario,
)

_DATA_DIR = Path(__file__).resolve().parent.parent.parent / "data"


class CommandBody(BaseModel):
    kind: str
    task: int | None = None
    factor: float | None = None
    job: str | None = None
    scenario: str | None = None
    tick: float | None = None
    seed: int | None = None
    pace: float | None = None
    rescheduling: bool | None = None


class JobBody(BaseModel):
    text: str
    name: str | None = None


class ScenarioBody(BaseModel):
    text: str
    name: str | None = None


class _RunHandle:
    def __init__(self, run_id: str, runner: SimRunner, pace: float) -> None:
        self.run_id = run_id
        self.runner = runner
        self.pace = pace
        self.lock = threading.Lock()
        self.resume_flag = threading.Event()
        self.resume_flag.set()
        self.stop_flag = threading.Event()
        self.thread: threading.Thread | None = None

    @property
    def paused(self) -> bool:
        return not self.resume_flag.is_set()

    def drive(self) -> None:
        tick_seconds = self.runner.config.tick * self.pace
        while not self.stop_flag.is_set():
            self.resume_flag.wait()
            with self.lock:
                if self.runner.finished:
                    break
                self.runner.step()
                finished = self.runner.finished
            if finished:
                break
            if tick_seconds > 0.0:
                time.sleep(tick_seconds)


def create_app(
    data_dir: str | Path | None = None,
    log_dir: str | Path | None = None,
    default_pace: float = 0.0,
    console_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service.  `data_dir` (default: the repository's data/
    directory) seeds the job/scenario registries; finished run logs are
    written under `log_dir` when given.  `console_dir` optionally points at a
    built browser console; its static files are then served at `/` so the UI
    is same-origin with the API."""
    app = FastAPI(title="cobotcell", version="0.1.0")
    jobs: dict[str, JobSpec] = {}
    scenarios: dict[str, ScenarioScript] = {}
    state_lock = threading.Lock()
    current: dict[str, _RunHandle | None] = {"handle": None}
    run_counter = {"n": 0}

    base = Path(data_dir) if data_dir is not None else _DATA_DIR
    if base.is_dir():
        for job_path in sorted(base.glob("*.job")):
            job = load_job(job_path)
            jobs[job.name] = job
        scen_dir = base / "scenarios"
        if scen_dir.is_dir():
            for scn_path in sorted(scen_dir.glob("*.scn")):
                script = load_scenario(scn_path)
                scenarios[script.name] = script

    def handle() -> _RunHandle | None:
        return current["handle"]

    def finish_handle(h: _RunHandle) -> None:
        if log_dir is not None and h.runner.finished:
            out = Path(log_dir)
            out.mkdir(parents=True, exist_ok=True)
            h.runner.log.save(out / f"{h.run_id}.jsonl")

    @app.get("/state")
    def get_state() -> dict:
        h = handle()
        if h is None:
            return {"active": False}
        with h.lock:
            runner = h.runner
            return {
                "active": True,
                "run_id": h.run_id,
                "job": runner.job.name,
                "scenario": runner.script.name,
                "rescheduling": runner.config.scheduler.rescheduling,
                "clock": runner.clock,
                "speed": runner.speed,
                "paused": h.paused,
                "finished": runner.finished,
                "last_seq": runner.log.last_seq,
                "state": runner.state.snapshot(),
            }

    @app.post("/command")
    def post_command(body: CommandBody) -> dict:
        if body.kind == "start-run":
            return start_run(body)
        h = handle()
        if h is None:
            raise HTTPException(status_code=409, detail="no active run")
        if body.kind == "pause":
            h.resume_flag.clear()
            return {"ok": True, "paused": True}
        if body.kind == "resume":
            h.resume_flag.set()
            return {"ok": True, "paused": False}
        with h.lock:
            if h.runner.finished:
                raise HTTPException(status_code=409, detail="run already finished")
            clock = h.runner.clock
            try:
                if body.kind == "delegate":
                    action = ScriptAction(at=clock, kind="message", verb="delegate", task_id=body.task)
                elif body.kind == "reassign":
                    action = ScriptAction(at=clock, kind="message", verb="reassign", task_id=body.task)
                elif body.kind == "confirm-done":
                    action = ScriptAction(at=clock, kind="confirm", task_id=body.task)
                elif body.kind == "set-human-speed":
                    action = ScriptAction(at=clock, kind="human-speed", factor=body.factor)
                else:
                    raise HTTPException(status_code=400, detail=f"unknown command kind {body.kind!r}")
            except ScenarioError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            h.runner.offer(action)
            return {"ok": True, "queued_at": clock, "last_seq": h.runner.log.last_seq}

    def start_run(body: CommandBody) -> dict:
        with state_lock:
            h = handle()
            if h is not None and not h.runner.finished:
                raise HTTPException(status_code=409, detail="a run is already active")
            job_name = body.job or (next(iter(sorted(jobs))) if jobs else None)
            if job_name is None or job_name not in jobs:
                raise HTTPException(status_code=404, detail=f"unknown job {job_name!r}")
            scenario_name = body.scenario or "nominal"
            if scenario_name not in scenarios:
                raise HTTPException(status_code=404, detail=f"unknown scenario {scenario_name!r}")
            config = SimConfig(
                tick=body.tick if body.tick is not None else 0.005,
                seed=body.seed if body.seed is not None else 0,
                scheduler=SchedulerConfig(
                    rescheduling=body.rescheduling if body.rescheduling is not None else True
                ),
            )
            try:
                runner = SimRunner(jobs[job_name], scenarios[scenario_name], config)
            except ScenarioError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            run_counter["n"] += 1
            run_id = f"run-{run_counter['n']:04d}-{time.strftime('%Y%m%dT%H%M%S')}"
            pace = body.pace if body.pace is not None else default_pace
            new_handle = _RunHandle(run_id, runner, pace)

            def drive_and_save() -> None:
                new_handle.drive()
                finish_handle(new_handle)

            new_handle.thread = threading.Thread(target=drive_and_save, daemon=True)
            current["handle"] = new_handle
            new_handle.thread.start()
            return {"ok": True, "run_id": run_id, "job": job_name, "scenario": scenario_name}

    @app.get("/events")
    async def get_events(from_sequence: int = Query(default=1)) -> StreamingResponse:
        if from_sequence < 0:
            raise HTTPException(status_code=400, detail="from_sequence must be >= 0")
        h = handle()
        if h is None:
            raise HTTPException(status_code=409, detail="no active run")

        async def stream():
            cursor = max(from_sequence, 1)
            while True:
                with h.lock:
                    batch = h.runner.log.since(cursor)
                    finished = h.runner.finished
                for event in batch:
                    cursor = event.seq + 1
                    yield f"id: {event.seq}\ndata: {event.to_json()}\n\n"
                if finished and not batch:
                    yield "event: end\ndata: {}\n\n"
                    return
                if not batch:
                    await asyncio.sleep(0.01)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/log", response_class=PlainTextResponse)
    def get_log() -> str:
        h = handle()
        if h is None:
            raise HTTPException(status_code=404, detail="no run yet")
        with h.lock:
            return h.runner.log.to_jsonl()

    @app.get("/jobs")
    def list_jobs() -> dict:
        return {
            name: {"tasks": len(job), "normalization_base": job.normalization_base}
            for name, job in sorted(jobs.items())
        }

    @app.post("/jobs")
    def add_job(body: JobBody) -> dict:
        try:
            job = parse_job(body.text, name_hint=body.name or "uploaded")
        except JobFileError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        jobs[job.name] = job
        return {"ok": True, "name": job.name, "tasks": len(job)}

    @app.get("/scenarios")
    def list_scenarios() -> dict:
        return {
            name: {"seed": s.seed, "actions": len(s.actions)}
            for name, s in sorted(scenarios.items())
        }

    @app.post("/scenarios")
    def add_scenario(body: ScenarioBody) -> dict:
        try:
            script = parse_scenario(body.text, name_hint=body.name or "uploaded")
        except ScenarioError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        scenarios[script.name] = script
        return {"ok": True, "name": script.name, "actions": len(script.actions)}

    if console_dir is not None:
        root = Path(console_dir)
        if not (root / "index.html").is_file():
            raise ValueError(f"console dir {root} has no index.html (build it first)")
        # mounted after all API routes so those keep precedence
        app.mount("/", StaticFiles(directory=root, html=True), name="console")

    return app


def saved_log_to_jsonl(path: str | Path) -> str:
    """Round-trip helper: load a saved log and re-serialize it canonically."""
    return EventLog.load(path).to_jsonl()
