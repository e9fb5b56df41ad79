// Wire protocol types and runtime validation for the simulator WebSocket.

export interface HelloMessage {
  type: "hello";
  config: ServerConfig;
  path: [number, number][];
}

export interface StateMessage {
  type: "state";
  t: number;
  p: [number, number];
  p_des: [number, number];
  m: [number, number, number, number];
  j: number;
  theta_hat_deg: number;
  theta_cmd_deg: number;
  converged: boolean;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  msg: string;
}

export type ServerMessage = HelloMessage | StateMessage | ErrorMessage;

// The slices of the config echo the UI actually uses.
export interface ServerConfig {
  mode: string;
  w_m: number[];
  arm: { l1: number; l2: number; [k: string]: unknown };
  ellipse: {
    center: [number, number];
    a_x: number;
    a_y: number;
    t_rev: number;
    [k: string]: unknown;
  };
  [k: string]: unknown;
}

function isVec2(v: unknown): v is [number, number] {
  return Array.isArray(v) && v.length === 2 && v.every(Number.isFinite);
}

export function parseServerMessage(raw: string): ServerMessage | null {
  let msg: unknown;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof msg !== "object" || msg === null || !("type" in msg)) return null;
  const m = msg as Record<string, unknown>;
  switch (m.type) {
    case "hello":
      if (
        typeof m.config === "object" && m.config !== null &&
        Array.isArray(m.path) && m.path.every(isVec2)
      ) {
        return m as unknown as HelloMessage;
      }
      return null;
    case "state":
      if (
        Number.isFinite(m.t) &&
        isVec2(m.p) && isVec2(m.p_des) &&
        Array.isArray(m.m) && m.m.length === 4 && m.m.every(Number.isFinite) &&
        Number.isFinite(m.j) &&
        Number.isFinite(m.theta_hat_deg) && Number.isFinite(m.theta_cmd_deg) &&
        typeof m.converged === "boolean"
      ) {
        return m as unknown as StateMessage;
      }
      return null;
    case "error":
      if (typeof m.code === "string" && typeof m.msg === "string") {
        return m as unknown as ErrorMessage;
      }
      return null;
    default:
      return null;
  }
}

export function cursorMessage(p: [number, number]): string {
  return JSON.stringify({ type: "cursor", p });
}

export function controlMessage(action: "start" | "stop" | "reset"): string {
  return JSON.stringify({ type: "control", action });
}

export function weightsMessage(w: number[]): string {
  return JSON.stringify({ type: "set_weights", w });
}
