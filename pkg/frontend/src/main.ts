// main.ts — page bootstrap.  The API base defaults to the page origin (the
// service can host the built console itself); `?api=http://host:port`
// overrides it for development against a separately running service.

import { ConsoleApp } from "./app.js";
import { ServiceClient } from "./client.js";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

const base = new URLSearchParams(window.location.search).get("api") ?? "";
const app = new ConsoleApp(new ServiceClient(base), el("app"), {
  jobSelect: el("job-select"),
  scenarioSelect: el("scenario-select"),
  paceInput: el("pace-input"),
  startButton: el("start-btn"),
  pauseButton: el("pause-btn"),
  speedSlider: el("speed-slider"),
  speedLabel: el("speed-label"),
  replayButton: el("replay-btn"),
  liveButton: el("live-btn"),
  scrub: el("scrub"),
  scrubLabel: el("scrub-label"),
});

void app.boot();
