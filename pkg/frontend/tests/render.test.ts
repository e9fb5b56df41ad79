import { describe, expect, it } from "vitest";

import {
  convergenceBanner,
  ellipsePoint,
  ellipsePolyline,
  majorAxisEndpoints,
  StripChart,
} from "../src/render.js";
import { StateMessage } from "../src/protocol.js";

const CENTER: [number, number] = [0.45, -0.1];

function state(partial: Partial<StateMessage>): StateMessage {
  return {
    type: "state",
    t: 0,
    p: [0.4, -0.1],
    p_des: [0.4, -0.1],
    m: [0, 0, 0, 0],
    j: 0,
    theta_hat_deg: 0,
    theta_cmd_deg: 0,
    converged: false,
    ...partial,
  };
}

describe("ellipse geometry", () => {
  it("major axis endpoints follow the rotation", () => {
    for (const deg of [0, 30, 60, 90]) {
      const [a, b] = majorAxisEndpoints(CENTER, 0.2, deg);
      const th = (deg * Math.PI) / 180;
      expect(a[0]).toBeCloseTo(CENTER[0] + 0.2 * Math.cos(th), 12);
      expect(a[1]).toBeCloseTo(CENTER[1] + 0.2 * Math.sin(th), 12);
      expect(b[0]).toBeCloseTo(CENTER[0] - 0.2 * Math.cos(th), 12);
    }
  });

  it("polyline starts on the major axis and stays on the ellipse", () => {
    const pts = ellipsePolyline(CENTER, 0.2, 0.1, 35, 90);
    expect(pts).toHaveLength(90);
    const [e1] = majorAxisEndpoints(CENTER, 0.2, 35);
    expect(pts[0][0]).toBeCloseTo(e1[0], 12);
    expect(pts[0][1]).toBeCloseTo(e1[1], 12);
    for (const p of pts) {
      const r = Math.hypot(p[0] - CENTER[0], p[1] - CENTER[1]);
      expect(r).toBeGreaterThanOrEqual(0.1 - 1e-12);
      expect(r).toBeLessThanOrEqual(0.2 + 1e-12);
    }
  });

  it("a half-turn reproduces the same point set", () => {
    const a = ellipsePolyline(CENTER, 0.2, 0.1, 20, 60);
    const b = ellipsePolyline(CENTER, 0.2, 0.1, 200, 60);
    for (let i = 0; i < 60; i++) {
      const j = (i + 30) % 60;
      expect(a[i][0]).toBeCloseTo(b[j][0], 10);
      expect(a[i][1]).toBeCloseTo(b[j][1], 10);
    }
  });

  it("point at phase 0 matches the rotated semi-major axis", () => {
    const p = ellipsePoint(CENTER, 0.2, 0.1, 90, 0);
    expect(p[0]).toBeCloseTo(CENTER[0], 12);
    expect(p[1]).toBeCloseTo(CENTER[1] + 0.2, 12);
  });
});

describe("convergence banner", () => {
  it("shows the wrapped solution once converged", () => {
    expect(convergenceBanner(state({ converged: true, theta_hat_deg: 39.5 }))).toBe(
      "Converged: 39.5°",
    );
  });

  it("is hidden otherwise", () => {
    expect(convergenceBanner(state({}))).toBeNull();
  });
});

describe("strip chart buffer", () => {
  it("drops samples older than the window", () => {
    const chart = new StripChart(10);
    for (let t = 0; t <= 25; t += 0.5) chart.push(t, t);
    expect(chart.size).toBeLessThanOrEqual(21);
    expect(chart.span[0]).toBeCloseTo(15, 6);
    expect(chart.span[1]).toBeCloseTo(25, 6);
  });

  it("reset clears history", () => {
    const chart = new StripChart(10);
    chart.push(1, 2);
    chart.reset();
    expect(chart.size).toBe(0);
  });
});
