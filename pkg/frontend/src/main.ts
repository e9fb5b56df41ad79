// Wiring: session, canvas rendering on animation frames, cursor capture,
// weight editor.  The browser never simulates physics; it renders whatever
// the server streams and sends intent (cursor position, controls) back.

import {
  ConnectionStatus,
  Session,
} from "./socket.js";
import {
  controlMessage,
  cursorMessage,
  HelloMessage,
  ServerMessage,
  StateMessage,
  weightsMessage,
} from "./protocol.js";
import {
  canvasToTask,
  clampToAnnulus,
  makeViewport,
  Viewport,
} from "./transform.js";
import {
  convergenceBanner,
  MUSCLE_LABELS,
  renderBars,
  renderScene,
  SceneConfig,
  StripChart,
} from "./render.js";
import { Throttle } from "./throttle.js";

const scene = document.getElementById("scene") as HTMLCanvasElement;
const bars = document.getElementById("bars") as HTMLCanvasElement;
const strip = document.getElementById("strip") as HTMLCanvasElement;
const banner = document.getElementById("banner") as HTMLDivElement;
const statusEl = document.getElementById("status") as HTMLDivElement;
const perfEl = document.getElementById("perf") as HTMLDivElement;
const timerEl = document.getElementById("timer") as HTMLDivElement;
const weightsEl = document.getElementById("weights") as HTMLDivElement;

interface UiState {
  hello: HelloMessage | null;
  latest: StateMessage | null;
  view: Viewport | null;
  sceneCfg: SceneConfig | null;
  reachMin: number;
  reachMax: number;
  interactive: boolean;
}

const ui: UiState = {
  hello: null,
  latest: null,
  view: null,
  sceneCfg: null,
  reachMin: 0.2,
  reachMax: 0.9,
  interactive: false,
};
const chart = new StripChart(60);

const wsUrl = `ws://${location.hostname}:${
  new URLSearchParams(location.search).get("port") ?? "8765"
}`;

function onHello(msg: HelloMessage): void {
  ui.hello = msg;
  const e = msg.config.ellipse;
  ui.sceneCfg = { center: e.center, aX: e.a_x, aY: e.a_y };
  ui.view = makeViewport(e.center, e.a_x, scene.width, scene.height);
  ui.reachMin = Math.abs(msg.config.arm.l1 - msg.config.arm.l2);
  ui.reachMax = msg.config.arm.l1 + msg.config.arm.l2;
  ui.interactive = msg.config.mode === "interactive";
  buildWeightEditor(msg.config.w_m);
  chart.reset();
}

function onMessage(msg: ServerMessage): void {
  if (msg.type === "hello") onHello(msg);
  else if (msg.type === "state") {
    ui.latest = msg;
    chart.push(msg.t, msg.theta_hat_deg);
  } else {
    console.warn(`server error ${msg.code}: ${msg.msg}`);
  }
}

function onStatus(status: ConnectionStatus, retryInS?: number): void {
  statusEl.textContent =
    status === "open"
      ? ui.interactive
        ? "connected - move the mouse to drive the arm"
        : "connected - watching the simulated subject"
      : status === "connecting"
        ? "connecting..."
        : `disconnected - retrying in ${retryInS}s`;
  statusEl.className = status === "open" ? "ok" : "warn";
}

const session = new Session(wsUrl, { onMessage, onStatus });
session.connect();

const cursorThrottle = new Throttle<[number, number]>(
  (p) => session.send(cursorMessage(p)),
  60,
);

scene.addEventListener("pointermove", (ev) => {
  if (!ui.interactive || ui.view === null) return;
  const rect = scene.getBoundingClientRect();
  const px: [number, number] = [
    ((ev.clientX - rect.left) / rect.width) * scene.width,
    ((ev.clientY - rect.top) / rect.height) * scene.height,
  ];
  const task = canvasToTask(ui.view, px);
  cursorThrottle.push(clampToAnnulus(task, ui.reachMin, ui.reachMax));
});

for (const action of ["start", "stop", "reset"] as const) {
  document.getElementById(`btn-${action}`)!.addEventListener("click", () => {
    session.send(controlMessage(action));
    if (action === "reset") chart.reset();
  });
}

function buildWeightEditor(w: number[]): void {
  weightsEl.innerHTML = "";
  const selects: HTMLSelectElement[] = [];
  MUSCLE_LABELS.forEach((label, i) => {
    const row = document.createElement("label");
    row.textContent = label + " ";
    const sel = document.createElement("select");
    for (const v of [1, 3, 5]) {   // low / medium / high priority
      const opt = document.createElement("option");
      opt.value = String(v);
      opt.textContent = { 1: "low (1)", 3: "medium (3)", 5: "high (5)" }[v]!;
      if (v === w[i]) opt.selected = true;
      sel.appendChild(opt);
    }
    sel.addEventListener("change", () => {
      session.send(weightsMessage(selects.map((s) => Number(s.value))));
    });
    selects.push(sel);
    row.appendChild(sel);
    weightsEl.appendChild(row);
  });
}

function frame(): void {
  const state = ui.latest;
  if (state !== null && ui.view !== null && ui.sceneCfg !== null) {
    renderScene(scene.getContext("2d")!, ui.view, ui.sceneCfg, state);
    renderBars(bars.getContext("2d")!, bars.width, bars.height, state.m);
    chart.draw(strip.getContext("2d")!, strip.width, strip.height);
    const text = convergenceBanner(state);
    banner.textContent = text ?? "";
    banner.className = text !== null ? "converged" : "";
    perfEl.textContent = `J = ${state.j.toFixed(3)}   orientation = ${state.theta_hat_deg.toFixed(1)}°`;
    timerEl.textContent = `t = ${state.t.toFixed(1)} s`;
  }
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
