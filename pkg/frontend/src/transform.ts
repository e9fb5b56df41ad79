// Affine mapping between the robot task plane (meters, y up) and canvas
// pixels (y down).  The view is centered on the ellipse center and sized so
// the whole rotated path plus margin stays visible at any orientation.

export interface Viewport {
  scale: number;    // px per meter
  cx: number;       // task-plane point mapped to the canvas center
  cy: number;
  width: number;    // canvas size, px
  height: number;
}

export function makeViewport(
  center: [number, number],
  aMajor: number,
  width: number,
  height: number,
  marginFactor = 1.6,
): Viewport {
  const extent = aMajor * marginFactor;
  const scale = Math.min(width, height) / (2 * extent);
  return { scale, cx: center[0], cy: center[1], width, height };
}

export function taskToCanvas(v: Viewport, p: [number, number]): [number, number] {
  return [
    v.width / 2 + (p[0] - v.cx) * v.scale,
    v.height / 2 - (p[1] - v.cy) * v.scale,
  ];
}

export function canvasToTask(v: Viewport, px: [number, number]): [number, number] {
  return [
    v.cx + (px[0] - v.width / 2) / v.scale,
    v.cy - (px[1] - v.height / 2) / v.scale,
  ];
}

// Keep cursor targets inside the arm's reachable annulus (slight inset so
// the simulated arm never hits a kinematic boundary).
export function clampToAnnulus(
  p: [number, number],
  reachMin: number,
  reachMax: number,
  inset = 0.01,
): [number, number] {
  const lo = reachMin + inset;
  const hi = reachMax - inset;
  const r = Math.hypot(p[0], p[1]);
  if (r < 1e-9) return [lo, 0];
  const clamped = Math.min(Math.max(r, lo), hi);
  if (clamped === r) return p;
  return [(p[0] * clamped) / r, (p[1] * clamped) / r];
}
