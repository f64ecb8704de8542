// render.ts — pure HTML-string views of the ViewModel.
//
// No DOM access here: every function maps data to markup, which keeps the
// rendering testable without a browser.  app.ts swaps the strings into the
// page and wires the interactions through delegated data-action attributes.

import type { DoneChip, LaneView, TaskChip, ViewModel } from "./viewmodel.js";

const esc = (value: unknown): string =>
  String(value)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");

function chipHtml(chip: TaskChip, actions: string): string {
  return (
    `<span class="chip chip-${chip.status}" data-task="${chip.id}">` +
    `<span class="chip-label">${esc(chip.label)}</span>${actions}</span>`
  );
}

function chipActions(lane: LaneView, chip: TaskChip): string {
  if (chip.status === "homing") return "";
  if (lane.agent === "human") {
    const confirm =
      chip.status === "current"
        ? `<button class="chip-btn" data-action="confirm-done" data-task="${chip.id}" title="confirm done">✓</button>`
        : "";
    return (
      `<button class="chip-btn" data-action="delegate" data-task="${chip.id}" title="delegate to robot">→R</button>` +
      confirm
    );
  }
  return `<button class="chip-btn" data-action="reassign" data-task="${chip.id}" title="reassign to human">→H</button>`;
}

export function renderLane(lane: LaneView): string {
  const held = lane.heldReason
    ? `<span class="badge badge-held">held: ${esc(lane.heldReason)}</span>`
    : "";
  const chips = lane.idle
    ? `<span class="lane-idle">idle</span>`
    : lane.chips.map((chip) => chipHtml(chip, chipActions(lane, chip))).join("");
  return (
    `<div class="lane lane-${lane.agent}">` +
    `<div class="lane-head"><span class="lane-name">${lane.agent}</span>${held}</div>` +
    `<div class="lane-chips">${chips}</div></div>`
  );
}

export function renderDone(done: DoneChip[]): string {
  if (done.length === 0) return `<span class="lane-idle">nothing finished yet</span>`;
  return done
    .map((chip) => `<span class="chip chip-done chip-${chip.outcome}">${chip.id}</span>`)
    .join("");
}

function renderGauge(view: ViewModel): string {
  if (!view.gauge) return `<span class="muted">no refill yet</span>`;
  const g = view.gauge;
  return (
    `<div class="stat-row"><span class="stat-label">human time left (est.)</span>` +
    `<span class="stat-value">${g.tRes.toFixed(3)}</span></div>` +
    `<div class="stat-row"><span class="stat-label">refill budget</span>` +
    `<span class="stat-value">${g.budget.toFixed(3)}</span></div>` +
    `<div class="stat-row"><span class="stat-label">pulled forward</span>` +
    `<span class="stat-value">${g.selected.join(", ") || "—"}</span></div>` +
    `<div class="stat-row"><span class="stat-label">new robot order</span>` +
    `<span class="stat-value">${g.newOrder.join(" → ")}</span></div>`
  );
}

function renderMetrics(view: ViewModel): string {
  const m = view.metrics;
  if (!m) return `<span class="muted">run still in progress</span>`;
  const rows: [string, string][] = [
    ["makespan", m.makespan.toFixed(4)],
    ["human busy / idle", `${m.human_busy.toFixed(4)} / ${m.human_idle.toFixed(4)}`],
    ["robot busy / idle", `${m.robot_busy.toFixed(4)} / ${m.robot_idle.toFixed(4)}`],
    ["queue refills", String(m.reschedule_count)],
    ["messages ok / rejected", `${m.messages_accepted} / ${m.messages_rejected}`],
  ];
  return rows
    .map(
      ([label, value]) =>
        `<div class="stat-row"><span class="stat-label">${label}</span>` +
        `<span class="stat-value">${esc(value)}</span></div>`,
    )
    .join("");
}

function renderPending(view: ViewModel): string {
  const entries = view.pending.slice(-8).reverse();
  if (entries.length === 0) return `<span class="muted">no commands sent</span>`;
  return entries
    .map((p) => {
      const what =
        p.kind === "set-human-speed" ? `speed ×${p.factor ?? "?"}` : `${p.kind} ${p.task ?? ""}`;
      const why = p.reason ? ` — ${esc(p.reason)}` : "";
      return `<div class="ack ack-${p.status}">${esc(what)}: ${p.status}${why}</div>`;
    })
    .join("");
}

function renderEventLog(view: ViewModel): string {
  const lines = view.lastEvents ?? [];
  if (lines.length === 0) return `<div class="event-line">waiting for events…</div>`;
  return lines
    .map(
      (l) =>
        `<div class="event-line"><span class="time">${l.clock.toFixed(3)}</span>${esc(l.text)}</div>`,
    )
    .join("");
}

export function renderApp(view: ViewModel): string {
  const statusClass = view.finished ? "badge-done" : view.connection === "live" ? "badge-live" : "badge-idle";
  const statusText = view.finished ? "finished" : view.connection;
  const banner = view.banner ? `<div class="banner">${esc(view.banner)}</div>` : "";
  const gate = view.gateOpen
    ? `<span class="badge badge-live">gate open</span>`
    : `<span class="badge badge-held">gate closed</span>`;
  return (
    banner +
    `<header><h1>cobot<span>cell</span> console</h1>` +
    `<div class="head-status"><span class="run-label">${esc(view.runLabel)}</span>` +
    `<span class="badge ${statusClass}">${esc(statusText)}</span>${gate}` +
    `<span class="clock">t = ${esc(view.clockText)}</span></div></header>` +
    `<section class="lanes">${renderLane(view.human)}${renderLane(view.robot)}</section>` +
    `<section class="card"><h2>finished tasks</h2><div class="lane-chips">${renderDone(view.done)}</div></section>` +
    `<div class="grid">` +
    `<section class="card"><h2>last queue refill</h2>${renderGauge(view)}</section>` +
    `<section class="card"><h2>run metrics</h2>${renderMetrics(view)}</section>` +
    `<section class="card"><h2>command acknowledgements</h2>${renderPending(view)}</section>` +
    `<section class="card"><h2>stream</h2><div class="event-log">${renderEventLog(view)}</div></section>` +
    `</div>`
  );
}
