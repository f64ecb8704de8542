// state.ts — console state, folded from server-acknowledged events only.
//
// The SSE stream is the single source of truth: every event carries the
// post-step scheduling snapshot, so the reducer never has to guess.  User
// commands are tracked as "pending" from the moment they are posted until the
// matching message-received / message-rejected / speed-changed event arrives
// on the stream (optimistic lane updates are deliberately impossible).

import type {
  MessageInfo,
  RescheduleInfo,
  RunMetrics,
  SchedulerSnapshot,
  WireEvent,
} from "./protocol.js";

export type ConnectionStatus = "idle" | "connecting" | "live" | "stale" | "ended";

export type CommandKind = "delegate" | "reassign" | "confirm-done" | "set-human-speed";

export type PendingStatus = "pending" | "accepted" | "rejected";

export interface PendingCommand {
  tag: number;
  kind: CommandKind;
  task?: number;
  factor?: number;
  status: PendingStatus;
  reason?: string;
}

export interface RunInfo {
  runId?: string;
  job?: string;
  scenario?: string;
  rescheduling?: boolean;
}

export interface ConsoleState {
  connection: ConnectionStatus;
  run: RunInfo | null;
  lastSeq: number;
  clock: number;
  snapshot: SchedulerSnapshot | null;
  finished: boolean;
  speedFactor: number;
  heldReason: string | null;
  lastReschedule: RescheduleInfo | null;
  metrics: RunMetrics | null;
  recent: WireEvent[];
  pending: PendingCommand[];
  nextTag: number;
}

export const RECENT_LIMIT = 250;

export function initialState(): ConsoleState {
  return {
    connection: "idle",
    run: null,
    lastSeq: 0,
    clock: 0,
    snapshot: null,
    finished: false,
    speedFactor: 1,
    heldReason: null,
    lastReschedule: null,
    metrics: null,
    recent: [],
    pending: [],
    nextTag: 1,
  };
}

/** Keep connection and command history, drop everything tied to the old run. */
export function freshRun(state: ConsoleState, run: RunInfo | null): ConsoleState {
  return {
    ...initialState(),
    connection: state.connection,
    run,
    pending: state.pending,
    nextTag: state.nextTag,
  };
}

export function setConnection(state: ConsoleState, connection: ConnectionStatus): ConsoleState {
  return state.connection === connection ? state : { ...state, connection };
}

export function enqueueCommand(
  state: ConsoleState,
  kind: CommandKind,
  detail: { task?: number; factor?: number } = {},
): [ConsoleState, number] {
  const tag = state.nextTag;
  const entry: PendingCommand = { tag, kind, status: "pending", ...detail };
  return [{ ...state, pending: [...state.pending, entry], nextTag: tag + 1 }, tag];
}

/** The HTTP round-trip itself failed; there will be no stream acknowledgement. */
export function failCommand(state: ConsoleState, tag: number, reason: string): ConsoleState {
  return {
    ...state,
    pending: state.pending.map((p) =>
      p.tag === tag && p.status === "pending" ? { ...p, status: "rejected", reason } : p,
    ),
  };
}

export function applyEvent(state: ConsoleState, event: WireEvent): ConsoleState {
  if (event.seq <= state.lastSeq) return state; // replayed duplicate
  const snapshot = (event.payload.state as SchedulerSnapshot | undefined) ?? state.snapshot;
  const recent =
    state.recent.length >= RECENT_LIMIT
      ? [...state.recent.slice(state.recent.length - RECENT_LIMIT + 1), event]
      : [...state.recent, event];
  let next: ConsoleState = {
    ...state,
    lastSeq: event.seq,
    clock: event.clock,
    snapshot,
    recent,
  };
  switch (event.kind) {
    case "run-started": {
      const p = event.payload as { job?: unknown; scenario?: unknown };
      next.run = {
        ...next.run,
        job: typeof p.job === "string" ? p.job : next.run?.job,
        scenario: typeof p.scenario === "string" ? p.scenario : next.run?.scenario,
      };
      break;
    }
    case "speed-changed": {
      const factor = event.payload.factor;
      if (typeof factor === "number") next.speedFactor = factor;
      next = resolvePending(next, (p) => p.kind === "set-human-speed", "accepted");
      break;
    }
    case "message-received":
    case "message-rejected": {
      const info = event.payload as unknown as MessageInfo;
      if (info.sender === "operator") {
        const status = event.kind === "message-received" ? "accepted" : "rejected";
        next = resolvePending(
          next,
          (p) => p.kind === info.kind && p.task === info.task,
          status,
          info.reason,
        );
      }
      break;
    }
    case "reschedule-applied":
      next.lastReschedule = event.payload as unknown as RescheduleInfo;
      break;
    case "robot-held": {
      const reason = event.payload.reason;
      next.heldReason = typeof reason === "string" ? reason : "held";
      break;
    }
    case "task-started":
      if (event.payload.agent === "robot") next.heldReason = null;
      break;
    case "gate-opened":
      if (next.heldReason === "gate") next.heldReason = null;
      break;
    case "run-completed":
      next.finished = true;
      next.metrics = pickMetrics(event.payload);
      break;
    default:
      break;
  }
  return next;
}

export function applyAll(state: ConsoleState, events: Iterable<WireEvent>): ConsoleState {
  let s = state;
  for (const e of events) s = applyEvent(s, e);
  return s;
}

function resolvePending(
  state: ConsoleState,
  matches: (p: PendingCommand) => boolean,
  status: PendingStatus,
  reason?: string,
): ConsoleState {
  const index = state.pending.findIndex((p) => p.status === "pending" && matches(p));
  if (index < 0) return state;
  const pending = state.pending.slice();
  const entry = pending[index]!;
  pending[index] = { ...entry, status, reason };
  return { ...state, pending };
}

function pickMetrics(payload: Record<string, unknown>): RunMetrics | null {
  const keys: (keyof RunMetrics)[] = [
    "makespan",
    "human_busy",
    "human_idle",
    "robot_busy",
    "robot_idle",
    "reschedule_count",
    "messages_accepted",
    "messages_rejected",
  ];
  const out: Partial<RunMetrics> = {};
  for (const k of keys) {
    const v = payload[k];
    if (typeof v !== "number") return null;
    out[k] = v;
  }
  return out as RunMetrics;
}
