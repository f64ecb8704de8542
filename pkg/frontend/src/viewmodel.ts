// viewmodel.ts — projection of ConsoleState into exactly what the page shows.
//
// The view model is derived from the latest server snapshot alone; nothing in
// here anticipates a command's effect.  Chips appear in list order, the
// executing task is flagged rather than removed (it stays in its lane until
// the server pops it), and the homing retraction renders as a special chip.

import { HOMING_TASK_ID } from "./protocol.js";
import type { SchedulerSnapshot, WireEvent } from "./protocol.js";
import type { ConsoleState, PendingCommand } from "./state.js";

export type ChipStatus = "current" | "queued" | "homing";

export interface TaskChip {
  id: number;
  label: string;
  status: ChipStatus;
}

export interface LaneView {
  agent: "human" | "robot";
  chips: TaskChip[];
  idle: boolean;
  heldReason: string | null; // robot only: why dispatch is on hold
}

export type DoneOutcome = "completed" | "forced" | "failed";

export interface DoneChip {
  id: number;
  outcome: DoneOutcome;
}

export interface GaugeView {
  tRes: number;
  budget: number;
  selected: number[];
  newOrder: number[];
}

export interface EventLine {
  clock: number;
  text: string;
}

export interface ViewModel {
  connection: ConsoleState["connection"];
  banner: string | null;
  runLabel: string;
  clockText: string;
  finished: boolean;
  gateOpen: boolean;
  speedFactor: number;
  human: LaneView;
  robot: LaneView;
  done: DoneChip[];
  gauge: GaugeView | null;
  metrics: ConsoleState["metrics"];
  pending: PendingCommand[];
  lastEvents: EventLine[];
  lastSeq: number;
}

const EVENT_LINE_LIMIT = 30;

function eventLine(event: WireEvent): EventLine {
  const p = event.payload;
  const bits: string[] = [event.kind];
  if (typeof p.task === "number") bits.push(`task ${p.task}`);
  if (typeof p.agent === "string") bits.push(`(${p.agent})`);
  if (typeof p.kind === "string") bits.push(String(p.kind));
  if (typeof p.reason === "string") bits.push(`[${p.reason}]`);
  if (typeof p.factor === "number") bits.push(`×${p.factor}`);
  if (Array.isArray(p.new_order)) bits.push(`→ ${(p.new_order as number[]).join(",")}`);
  return { clock: event.clock, text: bits.join(" ") };
}

export function chipLabel(id: number): string {
  return id === HOMING_TASK_ID ? "HOME" : String(id);
}

function lane(
  agent: "human" | "robot",
  ids: number[],
  current: number | null,
  heldReason: string | null,
): LaneView {
  const chips: TaskChip[] = ids.map((id) => ({
    id,
    label: chipLabel(id),
    status: id === HOMING_TASK_ID ? "homing" : id === current ? "current" : "queued",
  }));
  return { agent, chips, idle: chips.length === 0, heldReason };
}

function doneChips(snapshot: SchedulerSnapshot): DoneChip[] {
  const failed = new Set(snapshot.failed);
  const forced = new Set(snapshot.aborted);
  return snapshot.done.map((id) => ({
    id,
    outcome: failed.has(id) ? "failed" : forced.has(id) ? "forced" : "completed",
  }));
}

export function toViewModel(state: ConsoleState): ViewModel {
  const snapshot = state.snapshot;
  const human = lane("human", snapshot?.l_human ?? [], snapshot?.current_human ?? null, null);
  const robot = lane(
    "robot",
    snapshot?.l_robot ?? [],
    snapshot?.current_robot ?? null,
    state.heldReason,
  );
  const banner =
    state.connection === "stale"
      ? "connection lost — retrying, view may be stale"
      : state.connection === "idle"
        ? "no run"
        : null;
  const runLabel = state.run
    ? [state.run.job, state.run.scenario].filter(Boolean).join(" / ") || "run"
    : "no run";
  return {
    connection: state.connection,
    banner,
    runLabel,
    clockText: state.clock.toFixed(3),
    finished: state.finished,
    gateOpen: snapshot?.gate_open ?? false,
    speedFactor: state.speedFactor,
    human,
    robot,
    done: snapshot ? doneChips(snapshot) : [],
    gauge: state.lastReschedule
      ? {
          tRes: state.lastReschedule.t_res,
          budget: state.lastReschedule.budget,
          selected: state.lastReschedule.selected,
          newOrder: state.lastReschedule.new_order,
        }
      : null,
    metrics: state.metrics,
    pending: state.pending,
    lastEvents: state.recent.slice(-EVENT_LINE_LIMIT).map(eventLine),
    lastSeq: state.lastSeq,
  };
}

/** Every queued task id appears in exactly one lane, exactly once. */
export function laneIdsAreDisjoint(view: ViewModel): boolean {
  const seen = new Set<number>();
  for (const chip of [...view.human.chips, ...view.robot.chips]) {
    if (seen.has(chip.id)) return false;
    seen.add(chip.id);
  }
  return true;
}

/** Lanes on screen must equal the latest acknowledged snapshot, verbatim. */
export function lanesMatchSnapshot(view: ViewModel, snapshot: SchedulerSnapshot): boolean {
  const ids = (chips: TaskChip[]) => chips.map((c) => c.id);
  return (
    JSON.stringify(ids(view.human.chips)) === JSON.stringify(snapshot.l_human) &&
    JSON.stringify(ids(view.robot.chips)) === JSON.stringify(snapshot.l_robot)
  );
}
