// Trailing-edge rate limiter for the cursor stream: at most maxHz sends per
// second, always ending with the freshest value.

export class Throttle<T> {
  private last = -Infinity;
  private pending: T | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private readonly interval: number;

  constructor(
    private readonly send: (value: T) => void,
    maxHz = 60,
    private readonly now: () => number = () => performance.now(),
  ) {
    this.interval = 1000 / maxHz;
  }

  push(value: T): void {
    const t = this.now();
    if (t - this.last >= this.interval) {
      this.last = t;
      this.send(value);
    } else {
      this.pending = value;
      if (this.timer === null) {
        const wait = this.interval - (t - this.last);
        this.timer = setTimeout(() => this.flush(), wait);
      }
    }
  }

  private flush(): void {
    this.timer = null;
    if (this.pending === null) return;
    const t = this.now();
    if (t - this.last < this.interval) {
      // a leading-edge send raced us; respect the cap and retry later
      this.timer = setTimeout(() => this.flush(), this.interval - (t - this.last));
      return;
    }
    this.last = t;
    this.send(this.pending);
    this.pending = null;
  }

  dispose(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = null;
    this.pending = null;
  }
}
