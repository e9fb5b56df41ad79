// Scene drawing: oriented ellipse, desired (blue) and actual (red) dots,
// activation bars, orientation strip chart, convergence banner.  The
// geometry helpers are pure so they can be unit-tested without a canvas.

import { StateMessage } from "./protocol.js";
import { Viewport, taskToCanvas } from "./transform.js";

export const MUSCLE_LABELS = [
  "Lateral deltoid",
  "Anterior deltoid",
  "Biceps brachii",
  "Pectoralis major",
];
export const MUSCLE_COLORS = ["#5b8def", "#43b97f", "#e0a23d", "#d35f7a"];

export function ellipsePoint(
  center: [number, number],
  aX: number,
  aY: number,
  thetaDeg: number,
  phi: number,
): [number, number] {
  const th = (thetaDeg * Math.PI) / 180;
  const ex = aX * Math.cos(phi);
  const ey = aY * Math.sin(phi);
  return [
    center[0] + Math.cos(th) * ex - Math.sin(th) * ey,
    center[1] + Math.sin(th) * ex + Math.cos(th) * ey,
  ];
}

export function ellipsePolyline(
  center: [number, number],
  aX: number,
  aY: number,
  thetaDeg: number,
  n = 120,
): [number, number][] {
  const pts: [number, number][] = [];
  for (let k = 0; k < n; k++) {
    pts.push(ellipsePoint(center, aX, aY, thetaDeg, (2 * Math.PI * k) / n));
  }
  return pts;
}

export function majorAxisEndpoints(
  center: [number, number],
  aX: number,
  thetaDeg: number,
): [[number, number], [number, number]] {
  const th = (thetaDeg * Math.PI) / 180;
  const dx = aX * Math.cos(th);
  const dy = aX * Math.sin(th);
  return [
    [center[0] + dx, center[1] + dy],
    [center[0] - dx, center[1] - dy],
  ];
}

export function convergenceBanner(state: StateMessage): string | null {
  if (!state.converged) return null;
  return `Converged: ${state.theta_hat_deg.toFixed(1)}°`;
}

function drawPolyline(
  ctx: CanvasRenderingContext2D,
  view: Viewport,
  pts: [number, number][],
  close: boolean,
): void {
  ctx.beginPath();
  pts.forEach((p, i) => {
    const [x, y] = taskToCanvas(view, p);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  if (close) ctx.closePath();
  ctx.stroke();
}

function drawDot(
  ctx: CanvasRenderingContext2D,
  view: Viewport,
  p: [number, number],
  radius: number,
  color: string,
): void {
  const [x, y] = taskToCanvas(view, p);
  ctx.beginPath();
  ctx.arc(x, y, radius, 0, 2 * Math.PI);
  ctx.fillStyle = color;
  ctx.fill();
}

export interface SceneConfig {
  center: [number, number];
  aX: number;
  aY: number;
}

export function renderScene(
  ctx: CanvasRenderingContext2D,
  view: Viewport,
  scene: SceneConfig,
  state: StateMessage,
): void {
  ctx.clearRect(0, 0, view.width, view.height);

  ctx.strokeStyle = "#4466aa";
  ctx.lineWidth = 2;
  drawPolyline(
    ctx,
    view,
    ellipsePolyline(scene.center, scene.aX, scene.aY, state.theta_cmd_deg),
    true,
  );

  drawDot(ctx, view, state.p_des, 8, "#2b6fdf");  // desired: blue
  drawDot(ctx, view, state.p, 8, "#d23b3b");      // actual: red
}

export function renderBars(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  m: number[],
): void {
  ctx.clearRect(0, 0, width, height);
  const slot = width / m.length;
  const barW = slot * 0.6;
  m.forEach((v, i) => {
    const h = Math.min(Math.max(v, 0), 1.5) / 1.5 * (height - 18);
    ctx.fillStyle = MUSCLE_COLORS[i];
    ctx.fillRect(i * slot + (slot - barW) / 2, height - 14 - h, barW, h);
    ctx.fillStyle = "#ccc";
    ctx.font = "10px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(MUSCLE_LABELS[i].split(" ")[0], i * slot + slot / 2, height - 2);
  });
}

// Scrolling history of the orientation estimate.
export class StripChart {
  private t: number[] = [];
  private v: number[] = [];

  constructor(private readonly windowS = 60) {}

  push(t: number, value: number): void {
    this.t.push(t);
    this.v.push(value);
    const cutoff = t - this.windowS;
    let drop = 0;
    while (drop < this.t.length && this.t[drop] < cutoff) drop++;
    if (drop > 0) {
      this.t.splice(0, drop);
      this.v.splice(0, drop);
    }
  }

  get size(): number {
    return this.t.length;
  }

  get span(): [number, number] {
    if (this.t.length === 0) return [0, this.windowS];
    return [Math.max(0, this.t[this.t.length - 1] - this.windowS), this.t[this.t.length - 1]];
  }

  reset(): void {
    this.t = [];
    this.v = [];
  }

  draw(ctx: CanvasRenderingContext2D, width: number, height: number): void {
    ctx.clearRect(0, 0, width, height);
    ctx.strokeStyle = "#333";
    ctx.strokeRect(0.5, 0.5, width - 1, height - 1);
    const [t0, t1] = this.span;
    const y = (deg: number) => height / 2 - (deg / 90) * (height / 2 - 6);
    ctx.strokeStyle = "#666";
    ctx.beginPath();
    ctx.moveTo(0, y(0));
    ctx.lineTo(width, y(0));
    ctx.stroke();
    if (this.t.length < 2) return;
    ctx.strokeStyle = "#7fd1b9";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    for (let i = 0; i < this.t.length; i++) {
      const x = ((this.t[i] - t0) / Math.max(t1 - t0, 1e-9)) * width;
      if (i === 0) ctx.moveTo(x, y(this.v[i]));
      else ctx.lineTo(x, y(this.v[i]));
    }
    ctx.stroke();
  }
}
