// protocol.ts — the service's wire types, exactly as serialized.
//
// Everything the console knows arrives through three surfaces:
//   GET  /state      -> StateResponse (poll; used for discovery/finish checks)
//   POST /command    -> CommandBody in, ack JSON out (HTTP errors carry {detail})
//   GET  /events     -> server-sent events; each data line is one WireEvent
// Unknown fields are ignored everywhere so the console tolerates additions.

export type Agent = "human" | "robot";

/** Post-step scheduling state embedded in every event payload. */
export interface SchedulerSnapshot {
  l_human: number[];
  l_robot: number[];
  current_human: number | null;
  current_robot: number | null;
  done: number[];
  failed: number[];
  aborted: number[];
  gate_open: boolean;
}

export type EventKind =
  | "run-started"
  | "gate-opened"
  | "task-started"
  | "task-completed"
  | "task-aborted"
  | "task-failed"
  | "robot-failure-injected"
  | "reschedule-applied"
  | "message-received"
  | "message-rejected"
  | "homing-inserted"
  | "robot-held"
  | "speed-changed"
  | "run-completed";

export interface WireEvent {
  seq: number;
  clock: number;
  kind: EventKind;
  payload: Record<string, unknown> & { state?: SchedulerSnapshot };
}

export interface RunMetrics {
  makespan: number;
  human_busy: number;
  human_idle: number;
  robot_busy: number;
  robot_idle: number;
  reschedule_count: number;
  messages_accepted: number;
  messages_rejected: number;
}

export interface RescheduleInfo {
  t_res: number;
  budget: number;
  candidates: number[];
  selected: number[];
  selected_total: number;
  old_order: number[];
  new_order: number[];
}

export type MessageVerb = "delegate" | "reassign" | "confirm-done" | "handover-request";

export interface MessageInfo {
  sender: "operator" | "robot";
  kind: MessageVerb;
  task: number;
  reason?: string; // present on message-rejected
}

export interface StateResponse {
  active: boolean;
  run_id?: string;
  job?: string;
  scenario?: string;
  rescheduling?: boolean;
  clock?: number;
  speed?: number;
  paused?: boolean;
  finished?: boolean;
  last_seq?: number;
  state?: SchedulerSnapshot;
}

export type CommandBody =
  | {
      kind: "start-run";
      job?: string;
      scenario?: string;
      pace?: number;
      tick?: number;
      seed?: number;
      rescheduling?: boolean;
    }
  | { kind: "pause" }
  | { kind: "resume" }
  | { kind: "delegate"; task: number }
  | { kind: "reassign"; task: number }
  | { kind: "confirm-done"; task: number }
  | { kind: "set-human-speed"; factor: number };

/** The robot's retraction move travels on the wire as task id 0. */
export const HOMING_TASK_ID = 0;

export function isWireEvent(value: unknown): value is WireEvent {
  if (typeof value !== "object" || value === null) return false;
  const v = value as Record<string, unknown>;
  return (
    typeof v.seq === "number" &&
    Number.isInteger(v.seq) &&
    v.seq >= 1 &&
    typeof v.clock === "number" &&
    typeof v.kind === "string" &&
    typeof v.payload === "object" &&
    v.payload !== null
  );
}

export function parseWireEvent(json: string): WireEvent {
  let value: unknown;
  try {
    value = JSON.parse(json);
  } catch (err) {
    throw new Error(`unparseable event line: ${String(err)}`);
  }
  if (!isWireEvent(value)) {
    throw new Error(`event line is missing required fields: ${json.slice(0, 120)}`);
  }
  return value;
}

export function snapshotOf(event: WireEvent): SchedulerSnapshot | null {
  const s = event.payload.state;
  return s === undefined ? null : s;
}

// ── SSE framing ──────────────────────────────────────────────────────────
//
// The stream is plain text/event-stream:
//   id: <seq>\n data: <event json>\n \n     ... repeated ...
//   event: end\n data: {}\n \n              terminal frame on a finished run
// The parser is incremental: feed it arbitrary chunks, collect full frames.

export interface SseFrame {
  id?: string;
  event?: string;
  data: string;
}

export class SseParser {
  private buffer = "";

  /** Feed one transport chunk; returns every frame completed by it. */
  push(chunk: string): SseFrame[] {
    this.buffer += chunk.replace(/\r\n/g, "\n");
    const frames: SseFrame[] = [];
    for (;;) {
      const cut = this.buffer.indexOf("\n\n");
      if (cut < 0) break;
      const raw = this.buffer.slice(0, cut);
      this.buffer = this.buffer.slice(cut + 2);
      const frame = parseSseFrame(raw);
      if (frame !== null) frames.push(frame);
    }
    return frames;
  }
}

function parseSseFrame(raw: string): SseFrame | null {
  let id: string | undefined;
  let event: string | undefined;
  const data: string[] = [];
  for (const line of raw.split("\n")) {
    if (line.startsWith("id:")) id = line.slice(3).trim();
    else if (line.startsWith("event:")) event = line.slice(6).trim();
    else if (line.startsWith("data:")) data.push(line.slice(5).trimStart());
    // comment lines (":") and anything else are ignored, as SSE requires
  }
  if (id === undefined && event === undefined && data.length === 0) return null;
  return { id, event, data: data.join("\n") };
}
