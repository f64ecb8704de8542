"""Command-line entry points.

    cobotcell assign   <job-file>                 solve and print the assignment
    cobotcell simulate <job-file> <scenario-file> run a scenario, print metrics
    cobotcell replay   <log-file>                 pretty-print a saved run log
    cobotcell refs     <job-file> -o <file>       write synthetic reference data
    cobotcell serve                               start the HTTP/SSE service
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .assignment import enumerate_tied_optima, solve_assignment
from .errors import CapacityError, JobFileError, ScenarioError
from .events import EventLog
from .job import AgentId, load_job
from .monitor import synthetic_library
from .scheduler import SchedulerConfig
from .sim import SimConfig, load_scenario, run_scenario


def _cmd_assign(args: argparse.Namespace) -> int:
    job = load_job(args.job)
    solution = solve_assignment(job)
    print(f"job {job.name}: {len(job)} tasks, normalization base {job.normalization_base}")
    print(f"{'id':>3}  {'agent':<6} {'weight':>8} {'duration':>9}  label")
    for task in job.tasks:
        agent = solution.agent_of(task.id)
        w = task.weight(agent)
        d = task.duration(agent)
        print(f"{task.id:>3}  {agent.value:<6} {w:>8.4f} {d:>9.4f}  {task.label}")
    print(f"human load {solution.load_human:.4f}   robot load {solution.load_robot:.4f}")
    print(f"busy bound {solution.busy_bound:.4f}   objective {solution.objective:.6f}")
    if args.check_unique:
        try:
            ties = enumerate_tied_optima(job)
        except CapacityError as exc:
            print(f"uniqueness check skipped: {exc}")
        else:
            if len(ties) == 1:
                print("optimum is unique (exhaustive check)")
            else:
                print(f"optimum is NOT unique: {len(ties)} tied assignments")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    job = load_job(args.job)
    script = load_scenario(args.scenario)
    config = SimConfig(
        tick=args.tick,
        seed=args.seed,
        scheduler=SchedulerConfig(rescheduling=not args.baseline),
    )
    result = run_scenario(job, script, config)
    if not args.quiet:
        for event in result.log:
            payload = {k: v for k, v in event.payload.items() if k != "state"}
            print(f"{event.clock:8.3f}  {event.kind:<22} {payload}")
    m = result.metrics
    print(f"makespan {m.makespan:.4f}")
    print(f"human: busy {m.human_busy:.4f}  idle {m.human_idle:.4f}")
    print(f"robot: busy {m.robot_busy:.4f}  idle {m.robot_idle:.4f}")
    print(
        f"reschedules {m.reschedule_count}  messages accepted {m.messages_accepted} "
        f"rejected {m.messages_rejected}"
    )
    if args.save_log:
        result.log.save(args.save_log)
        print(f"log written to {args.save_log}")
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    log = EventLog.load(args.log)
    for event in log:
        payload = {k: v for k, v in event.payload.items() if k != "state"}
        print(f"{event.seq:>5}  {event.clock:8.3f}  {event.kind:<22} {payload}")
    last = log[len(log) - 1] if len(log) else None
    if last is not None and last.kind == "run-completed":
        print(f"run completed: makespan {last.payload['makespan']}")
    else:
        print("log ends before run completion")
    return 0


def _cmd_refs(args: argparse.Namespace) -> int:
    job = load_job(args.job)
    library = synthetic_library(job, period=args.period)
    library.save(args.out)
    print(f"wrote {len(library)} reference recordings to {args.out}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(
        data_dir=args.data_dir,
        log_dir=args.log_dir,
        default_pace=args.pace,
        console_dir=args.console_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cobotcell",
        description="Exact human/robot task assignment with reactive robot-queue scheduling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assign", help="solve the offline assignment for a job file")
    p.add_argument("job", type=Path)
    p.add_argument(
        "--check-unique", action="store_true", help="exhaustively verify optimality/uniqueness"
    )
    p.set_defaults(func=_cmd_assign)

    p = sub.add_parser("simulate", help="run a scenario and print the event timeline")
    p.add_argument("job", type=Path)
    p.add_argument("scenario", type=Path)
    p.add_argument("--tick", type=float, default=0.005)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--baseline", action="store_true", help="disable queue refilling")
    p.add_argument("--save-log", type=Path, default=None)
    p.add_argument("--quiet", action="store_true", help="metrics only, no timeline")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("replay", help="pretty-print a saved run log")
    p.add_argument("log", type=Path)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("refs", help="write a synthetic reference library for a job")
    p.add_argument("job", type=Path)
    p.add_argument("-o", "--out", type=Path, required=True)
    p.add_argument("--period", type=float, default=0.005)
    p.set_defaults(func=_cmd_refs)

    p = sub.add_parser("serve", help="start the HTTP/SSE service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8700)
    p.add_argument("--pace", type=float, default=1.0, help="wall seconds per normalized time unit")
    p.add_argument("--data-dir", type=Path, default=None)
    p.add_argument("--log-dir", type=Path, default=None)
    p.add_argument(
        "--console-dir",
        type=Path,
        default=None,
        help="serve a built browser console (directory with index.html) at /",
    )
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (JobFileError, ScenarioError, CapacityError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
