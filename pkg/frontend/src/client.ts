// client.ts — thin typed HTTP/SSE access to the scheduling service.
//
// Uses fetch streaming (not EventSource) so the exact same code runs in the
// browser and under Node-based tests.  `followEvents` resumes from the last
// seen sequence number after a drop, which is what makes the stream safe to
// treat as the single source of truth.

import { SseParser, parseWireEvent } from "./protocol.js";
import type { CommandBody, StateResponse, WireEvent } from "./protocol.js";

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, detail: string) {
    super(detail);
    this.status = status;
  }
}

async function jsonOrThrow(response: Response): Promise<unknown> {
  if (response.ok) return response.json();
  let detail = `${response.status}`;
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ServiceClient {
  readonly base: string;

  constructor(base: string) {
    this.base = base.replace(/\/$/, "");
  }

  async getState(): Promise<StateResponse> {
    return (await jsonOrThrow(await fetch(`${this.base}/state`))) as StateResponse;
  }

  async command(body: CommandBody): Promise<Record<string, unknown>> {
    const response = await fetch(`${this.base}/command`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return (await jsonOrThrow(response)) as Record<string, unknown>;
  }

  async listJobs(): Promise<Record<string, { tasks: number; normalization_base: number }>> {
    return (await jsonOrThrow(await fetch(`${this.base}/jobs`))) as Record<
      string,
      { tasks: number; normalization_base: number }
    >;
  }

  async listScenarios(): Promise<Record<string, { seed: number; actions: number }>> {
    return (await jsonOrThrow(await fetch(`${this.base}/scenarios`))) as Record<
      string,
      { seed: number; actions: number }
    >;
  }

  async downloadLog(): Promise<string> {
    const response = await fetch(`${this.base}/log`);
    if (!response.ok) throw new ApiError(response.status, `log unavailable (${response.status})`);
    return response.text();
  }
}

export interface FollowHandlers {
  onEvent: (event: WireEvent) => void;
  /** The server said the run is over and the stream is complete. */
  onEnd: () => void;
  /** Transport dropped; the follower will retry and resume. */
  onStale?: (error: unknown) => void;
  /** A (re)connection is delivering events again. */
  onLive?: () => void;
}

export interface FollowOptions {
  fromSequence?: number;
  signal?: AbortSignal;
  retryDelayMs?: number;
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Follow the event stream until the server's end marker, resuming from the
 * next unseen sequence number whenever the connection drops.  Resolves at
 * end-of-run; rejects only on abort or a non-retryable HTTP refusal.
 */
export async function followEvents(
  base: string,
  handlers: FollowHandlers,
  options: FollowOptions = {},
): Promise<void> {
  const root = base.replace(/\/$/, "");
  let cursor = options.fromSequence ?? 1;
  const retryDelayMs = options.retryDelayMs ?? 500;
  for (;;) {
    try {
      const response = await fetch(`${root}/events?from_sequence=${cursor}`, {
        signal: options.signal ?? null,
        headers: { accept: "text/event-stream" },
      });
      if (!response.ok || response.body === null) {
        throw new ApiError(response.status, `event stream refused (${response.status})`);
      }
      handlers.onLive?.();
      const reader = response.body.getReader();
      const decoder = new TextDecoder();
      const parser = new SseParser();
      for (;;) {
        const { done, value } = await reader.read();
        if (done) break; // connection closed without the end marker
        for (const frame of parser.push(decoder.decode(value, { stream: true }))) {
          if (frame.event === "end") {
            handlers.onEnd();
            return;
          }
          if (frame.data === "") continue;
          const event = parseWireEvent(frame.data);
          cursor = event.seq + 1;
          handlers.onEvent(event);
        }
      }
      throw new Error("event stream closed early");
    } catch (error) {
      if (options.signal?.aborted) throw error;
      if (error instanceof ApiError && error.status !== 409) throw error;
      handlers.onStale?.(error);
      await sleep(retryDelayMs);
    }
  }
}
