// app.ts — browser controller: one reducer state, one render sink.
//
// Live mode follows the SSE stream and re-renders on every acknowledged
// event.  Replay mode folds a downloaded log up to the scrub cursor with the
// same reducer, so what you scrub through is exactly what live rendering
// would have shown.  All mutations flow through sendCommand -> pending entry
// -> stream acknowledgement; the lanes never move on a click alone.

import { ServiceClient, followEvents } from "./client.js";
import type { CommandBody } from "./protocol.js";
import {
  applyEvent,
  enqueueCommand,
  failCommand,
  freshRun,
  initialState,
  setConnection,
} from "./state.js";
import type { CommandKind, ConsoleState } from "./state.js";
import { Replay } from "./replay.js";
import { renderApp } from "./render.js";
import { toViewModel } from "./viewmodel.js";

export interface ControlElements {
  jobSelect: HTMLSelectElement;
  scenarioSelect: HTMLSelectElement;
  paceInput: HTMLInputElement;
  startButton: HTMLButtonElement;
  pauseButton: HTMLButtonElement;
  speedSlider: HTMLInputElement;
  speedLabel: HTMLElement;
  replayButton: HTMLButtonElement;
  liveButton: HTMLButtonElement;
  scrub: HTMLInputElement;
  scrubLabel: HTMLElement;
}

export class ConsoleApp {
  private state: ConsoleState = initialState();
  private mode: "live" | "replay" = "live";
  private replay: Replay | null = null;
  private abort: AbortController | null = null;
  private paused = false;

  constructor(
    private readonly client: ServiceClient,
    private readonly root: HTMLElement,
    private readonly controls: ControlElements,
  ) {}

  async boot(): Promise<void> {
    this.bindControls();
    this.bindChipActions();
    this.renderNow();
    await this.populateRegistries();
    const status = await this.client.getState().catch(() => null);
    if (status?.active) {
      this.state = freshRun(this.state, {
        runId: status.run_id,
        job: status.job,
        scenario: status.scenario,
        rescheduling: status.rescheduling,
      });
      this.follow(1);
    }
  }

  // ── wiring ────────────────────────────────────────────────────────────

  private bindControls(): void {
    const c = this.controls;
    c.startButton.addEventListener("click", () => void this.startRun());
    c.pauseButton.addEventListener("click", () => void this.togglePause());
    c.speedSlider.addEventListener("input", () => {
      c.speedLabel.textContent = `×${Number(c.speedSlider.value).toFixed(2)}`;
    });
    c.speedSlider.addEventListener("change", () => {
      void this.sendCommand("set-human-speed", { factor: Number(c.speedSlider.value) });
    });
    c.replayButton.addEventListener("click", () => void this.enterReplay());
    c.liveButton.addEventListener("click", () => this.exitReplay());
    c.scrub.addEventListener("input", () => this.renderNow());
  }

  private bindChipActions(): void {
    this.root.addEventListener("click", (raw) => {
      if (this.mode === "replay") return;
      const target = raw.target as HTMLElement | null;
      const button = target?.closest<HTMLElement>("[data-action]");
      if (!button) return;
      const action = button.dataset.action as CommandKind | undefined;
      const task = Number(button.dataset.task);
      if (!action || !Number.isInteger(task)) return;
      void this.sendCommand(action, { task });
    });
  }

  private async populateRegistries(): Promise<void> {
    try {
      const [jobs, scenarios] = await Promise.all([
        this.client.listJobs(),
        this.client.listScenarios(),
      ]);
      fillSelect(this.controls.jobSelect, Object.keys(jobs));
      fillSelect(this.controls.scenarioSelect, Object.keys(scenarios), "nominal");
    } catch {
      // service unreachable; boot banner already says "no run"
    }
  }

  // ── live mode ─────────────────────────────────────────────────────────

  private async startRun(): Promise<void> {
    const body: CommandBody = {
      kind: "start-run",
      job: this.controls.jobSelect.value || undefined,
      scenario: this.controls.scenarioSelect.value || undefined,
      pace: Number(this.controls.paceInput.value) || 0,
    };
    try {
      const ack = await this.client.command(body);
      this.abort?.abort();
      this.state = freshRun(this.state, {
        runId: typeof ack.run_id === "string" ? ack.run_id : undefined,
        job: typeof ack.job === "string" ? ack.job : undefined,
        scenario: typeof ack.scenario === "string" ? ack.scenario : undefined,
      });
      this.paused = false;
      this.exitReplay();
      this.follow(1);
    } catch (error) {
      this.flash(`start refused: ${message(error)}`);
    }
  }

  private follow(fromSequence: number): void {
    this.abort = new AbortController();
    this.state = setConnection(this.state, "connecting");
    this.renderNow();
    void followEvents(
      this.client.base,
      {
        onEvent: (event) => {
          this.state = applyEvent(this.state, event);
          this.renderNow();
        },
        onEnd: () => {
          this.state = setConnection(this.state, "ended");
          this.renderNow();
        },
        onLive: () => {
          this.state = setConnection(this.state, "live");
          this.renderNow();
        },
        onStale: () => {
          this.state = setConnection(this.state, "stale");
          this.renderNow();
        },
      },
      { fromSequence, signal: this.abort.signal },
    ).catch((error) => {
      if (!this.abort?.signal.aborted) this.flash(`stream failed: ${message(error)}`);
    });
  }

  private async togglePause(): Promise<void> {
    try {
      const ack = await this.client.command({ kind: this.paused ? "resume" : "pause" });
      this.paused = ack.paused === true;
      this.controls.pauseButton.textContent = this.paused ? "resume" : "pause";
    } catch (error) {
      this.flash(`pause refused: ${message(error)}`);
    }
  }

  private async sendCommand(
    kind: CommandKind,
    detail: { task?: number; factor?: number },
  ): Promise<void> {
    const [next, tag] = enqueueCommand(this.state, kind, detail);
    this.state = next;
    this.renderNow();
    const body =
      kind === "set-human-speed"
        ? ({ kind, factor: detail.factor ?? 1 } as CommandBody)
        : ({ kind, task: detail.task ?? 0 } as CommandBody);
    try {
      await this.client.command(body);
      // leave status "pending": only the stream acknowledgement settles it
    } catch (error) {
      this.state = failCommand(this.state, tag, message(error));
      this.renderNow();
    }
  }

  // ── replay mode ───────────────────────────────────────────────────────

  private async enterReplay(): Promise<void> {
    try {
      const text = await this.client.downloadLog();
      this.replay = Replay.fromJsonl(text);
    } catch (error) {
      this.flash(`no log to replay: ${message(error)}`);
      return;
    }
    this.mode = "replay";
    this.controls.scrub.max = String(this.replay.length);
    this.controls.scrub.value = String(this.replay.length);
    this.renderNow();
  }

  private exitReplay(): void {
    this.mode = "live";
    this.replay = null;
    this.renderNow();
  }

  // ── rendering ─────────────────────────────────────────────────────────

  private renderNow(): void {
    let state = this.state;
    if (this.mode === "replay" && this.replay) {
      const cursor = Number(this.controls.scrub.value);
      state = this.replay.stateAt(cursor);
      this.controls.scrubLabel.textContent = `${cursor}/${this.replay.length}`;
    }
    this.root.classList.toggle("replaying", this.mode === "replay");
    document.body.classList.toggle("replay-mode", this.mode === "replay");
    this.root.innerHTML = renderApp(toViewModel(state));
  }

  private flash(text: string): void {
    const note = document.createElement("div");
    note.className = "flash";
    note.textContent = text;
    document.body.appendChild(note);
    setTimeout(() => note.remove(), 4000);
  }
}

function fillSelect(select: HTMLSelectElement, names: string[], prefer?: string): void {
  select.innerHTML = "";
  for (const name of names) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    if (name === prefer) option.selected = true;
    select.appendChild(option);
  }
}

function message(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}
