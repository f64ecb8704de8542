// replay.ts — read-only scrubbing over a downloaded run log.
//
// A saved log is JSONL: one canonical event per line, sequence numbers
// contiguous from 1.  Scrubbing re-folds the reducer from the start up to the
// cursor; runs are a few hundred events, so refolding is instant and keeps a
// single code path with the live view (same reducer, same view model).

import { parseWireEvent } from "./protocol.js";
import type { WireEvent } from "./protocol.js";
import { applyEvent, initialState } from "./state.js";
import type { ConsoleState } from "./state.js";

export function parseLogJsonl(text: string): WireEvent[] {
  const events: WireEvent[] = [];
  for (const line of text.split("\n")) {
    if (line.trim() === "") continue;
    events.push(parseWireEvent(line));
  }
  events.forEach((event, i) => {
    if (event.seq !== i + 1) {
      throw new Error(`broken log: line ${i + 1} has seq ${event.seq}`);
    }
  });
  return events;
}

export class Replay {
  readonly events: WireEvent[];

  constructor(events: WireEvent[]) {
    this.events = events;
  }

  static fromJsonl(text: string): Replay {
    return new Replay(parseLogJsonl(text));
  }

  get length(): number {
    return this.events.length;
  }

  /** Console state after folding the first `count` events (0 = before any). */
  stateAt(count: number): ConsoleState {
    const n = Math.max(0, Math.min(count, this.events.length));
    let state = initialState();
    state = { ...state, connection: "ended" };
    for (let i = 0; i < n; i++) state = applyEvent(state, this.events[i]!);
    return state;
  }

  finalState(): ConsoleState {
    return this.stateAt(this.events.length);
  }
}
