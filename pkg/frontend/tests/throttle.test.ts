import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { Throttle } from "../src/throttle.js";

describe("cursor throttle", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("caps a 120 Hz stream at 60 msgs per second", () => {
    const sent: number[] = [];
    const throttle = new Throttle<number>((v) => sent.push(v), 60, () => Date.now());
    // 2 s of 120 Hz pointer events
    for (let i = 0; i < 240; i++) {
      throttle.push(i);
      vi.advanceTimersByTime(1000 / 120);
    }
    expect(sent.length).toBeLessThanOrEqual(121); // 60/s plus the leading edge
    expect(sent.length).toBeGreaterThan(100);     // but not starved
  });

  it("delivers the freshest value on the trailing edge", () => {
    const sent: number[] = [];
    const throttle = new Throttle<number>((v) => sent.push(v), 60, () => Date.now());
    throttle.push(1);
    throttle.push(2);
    throttle.push(3);
    expect(sent).toEqual([1]);
    vi.advanceTimersByTime(30);
    expect(sent).toEqual([1, 3]);
  });

  it("passes a slow stream through untouched", () => {
    const sent: number[] = [];
    const throttle = new Throttle<number>((v) => sent.push(v), 60, () => Date.now());
    for (let i = 0; i < 10; i++) {
      throttle.push(i);
      vi.advanceTimersByTime(100);
    }
    expect(sent).toEqual([0, 1, 2, 3, 4, 5, 6, 7, 8, 9]);
  });

  it("dispose cancels pending sends", () => {
    const sent: number[] = [];
    const throttle = new Throttle<number>((v) => sent.push(v), 60, () => Date.now());
    throttle.push(1);
    throttle.push(2);
    throttle.dispose();
    vi.advanceTimersByTime(1000);
    expect(sent).toEqual([1]);
  });
});
