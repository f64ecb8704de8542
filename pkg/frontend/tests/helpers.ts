// helpers.ts — synthetic wire data shaped exactly like the service emits.

import type { EventKind, SchedulerSnapshot, WireEvent } from "../src/protocol.js";

export function makeSnapshot(over: Partial<SchedulerSnapshot> = {}): SchedulerSnapshot {
  return {
    l_human: [1, 2, 3, 4, 5, 6],
    l_robot: [7, 8, 9, 10, 11],
    current_human: 1,
    current_robot: null,
    done: [],
    failed: [],
    aborted: [],
    gate_open: false,
    ...over,
  };
}

let autoSeq = 0;

export function resetSeq(): void {
  autoSeq = 0;
}

export function makeEvent(
  kind: EventKind,
  payload: Record<string, unknown> = {},
  over: { seq?: number; clock?: number; state?: SchedulerSnapshot } = {},
): WireEvent {
  const seq = over.seq ?? ++autoSeq;
  if (over.seq !== undefined) autoSeq = over.seq;
  return {
    seq,
    clock: over.clock ?? 0,
    kind,
    payload: { ...payload, state: over.state ?? makeSnapshot() },
  };
}

/** Canonical-format JSONL line for one event (sorted keys, compact). */
export function toCanonicalLine(event: WireEvent): string {
  const sort = (value: unknown): unknown => {
    if (Array.isArray(value)) return value.map(sort);
    if (value !== null && typeof value === "object") {
      const entries = Object.entries(value as Record<string, unknown>).sort(([a], [b]) =>
        a < b ? -1 : a > b ? 1 : 0,
      );
      return Object.fromEntries(entries.map(([k, v]) => [k, sort(v)]));
    }
    return value;
  };
  return JSON.stringify(sort({ clock: event.clock, kind: event.kind, payload: event.payload, seq: event.seq }));
}
