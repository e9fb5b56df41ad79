"""Real-time WebSocket service around the closed loop.

One simulation task owns all state.  Sessions talk to it through queues of
JSON text frames:

    server -> client:
        {"type": "hello", "config": {...}, "path": [[x, y], ...]}
        {"type": "state", "t": s, "p": [x,y], "p_des": [x,y], "m": [..4],
         "j": f, "theta_hat_deg": f, "theta_cmd_deg": f, "converged": b}
        {"type": "error", "code": str, "msg": str}
    client -> server:
        {"type": "cursor", "p": [x, y]}
        {"type": "control", "action": "start" | "stop" | "reset"}
        {"type": "set_weights", "w": [..4]}

In interactive mode the loop pauses whenever no cursor input has arrived for
half a second (telemetry keeps flowing so clients stay in sync); in
simulated-human mode the modeled subject drives the plant and cursor frames
are ignored.
"""

from __future__ import annotations

import asyncio
import json
import math

import numpy as np
import websockets
from websockets.asyncio.server import serve as ws_serve

from .config import SimConfig, to_dict
from .sim import ClosedLoop
from .trajectory import ellipse_path

PATH_POINTS = 360
STALE_CURSOR_S = 0.5


def _state_message(loop: ClosedLoop) -> str:
    rec = loop.snapshot()
    return json.dumps(
        {
            "type": "state",
            "t": round(rec.t, 6),
            "p": [rec.p[0], rec.p[1]],
            "p_des": [rec.p_des[0], rec.p_des[1]],
            "m": [float(v) for v in rec.m],
            "j": rec.j_smooth,
            "theta_hat_deg": rec.theta_hat_deg,
            "theta_cmd_deg": rec.theta_cmd_deg,
            "converged": rec.converged,
        }
    )


def _error_message(code: str, msg: str) -> str:
    return json.dumps({"type": "error", "code": code, "msg": msg})


class SimServer:
    """Owns the loop task and the client sessions."""

    def __init__(self, config: SimConfig, host: str = "127.0.0.1", port: int = 0):
        self.config = config
        self.host = host
        self.port = port
        self.loop = ClosedLoop(config)
        self.running = True          # start/stop control latch
        self._clients: set = set()
        self._server = None
        self._task: asyncio.Task | None = None

    # -- lifecycle -----------------------------------------------------------

    async def start(self) -> None:
        self._server = await ws_serve(self._session, self.host, self.port)
        self.port = next(iter(self._server.sockets)).getsockname()[1]
        self._task = asyncio.create_task(self._run_loop())

    async def stop(self) -> None:
        if self._task is not None:
            self._task.cancel()
            try:
                await self._task
            except asyncio.CancelledError:
                pass
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    # -- the real-time loop ---------------------------------------------------

    def _paused(self) -> bool:
        if not self.running:
            return True
        if self.config.mode == "interactive":
            _, stale = self.loop.cursor.target(self.loop.t)
            return stale
        return False

    async def _run_loop(self) -> None:
        fs = self.config.rates.physics_hz
        tel = self.config.rates.telemetry_hz
        frame = 1.0 / tel
        frame_index = 0
        steps_done = 0
        next_check = 1.0
        clock = asyncio.get_running_loop().time
        next_frame = clock() + frame
        while True:
            await asyncio.sleep(max(0.0, next_frame - clock()))
            next_frame += frame
            if clock() > next_frame + 1.0:
                next_frame = clock() + frame   # fell behind; drop lost frames
            frame_index += 1
            if not self._paused():
                steps_due = int(round(frame_index * fs / tel))
                for _ in range(steps_due - steps_done):
                    self.loop.step()
                steps_done = steps_due
                self.loop.record_telemetry()
                if self.loop.t >= next_check:
                    if not self.loop.status.converged:
                        self.loop._check_convergence(self.loop.t)
                    next_check = math.floor(self.loop.t) + 1.0
            else:
                steps_done = int(round(frame_index * fs / tel))
            self._broadcast(_state_message(self.loop))

    def _broadcast(self, message: str) -> None:
        for client in list(self._clients):
            try:
                client.put_nowait(message)
            except asyncio.QueueFull:
                # slow client: drop its oldest frame rather than stall the loop
                try:
                    client.get_nowait()
                    client.put_nowait(message)
                except (asyncio.QueueEmpty, asyncio.QueueFull):
                    pass

    # -- session handling ------------------------------------------------------

    async def _session(self, ws) -> None:
        outbox: asyncio.Queue[str] = asyncio.Queue(maxsize=8)
        self._clients.add(outbox)
        sender = asyncio.create_task(self._drain(ws, outbox))
        try:
            await ws.send(self._hello())
            async for frame in ws:
                reply = self._handle(frame)
                if reply is not None:
                    await ws.send(reply)
        except websockets.ConnectionClosed:
            pass
        finally:
            self._clients.discard(outbox)
            sender.cancel()

    async def _drain(self, ws, outbox: asyncio.Queue) -> None:
        try:
            while True:
                await ws.send(await outbox.get())
        except (websockets.ConnectionClosed, asyncio.CancelledError):
            pass

    def _hello(self) -> str:
        path = ellipse_path(self.config.ellipse, self.loop.theta_path, PATH_POINTS)
        return json.dumps(
            {
                "type": "hello",
                "config": to_dict(self.config),
                "path": [[float(x), float(y)] for x, y in path],
            }
        )

    def _handle(self, frame) -> str | None:
        try:
            msg = json.loads(frame)
        except (json.JSONDecodeError, UnicodeDecodeError):
            return _error_message("bad-json", "frame is not valid JSON")
        if not isinstance(msg, dict) or "type" not in msg:
            return _error_message("bad-frame", "expected an object with a type")

        kind = msg["type"]
        if kind == "cursor":
            return self._on_cursor(msg)
        if kind == "control":
            return self._on_control(msg)
        if kind == "set_weights":
            return self._on_weights(msg)
        return _error_message("unknown-type", f"unknown message type {kind!r}")

    def _on_cursor(self, msg) -> str | None:
        p = msg.get("p")
        if (
            not isinstance(p, list)
            or len(p) != 2
            or not all(isinstance(v, (int, float)) and math.isfinite(v) for v in p)
        ):
            return _error_message("bad-cursor", "cursor needs p: [x, y] finite")
        arm = self.config.arm
        x, y = float(p[0]), float(p[1])
        r = math.hypot(x, y)
        lo, hi = arm.reach_min + 0.01, arm.reach_max - 0.01
        if r < 1e-9:
            x, y = lo, 0.0
        elif r < lo or r > hi:
            scale = min(max(r, lo), hi) / r
            x, y = x * scale, y * scale
        self.loop.cursor.update(np.array([x, y]), self.loop.t)
        return None

    def _on_control(self, msg) -> str | None:
        action = msg.get("action")
        if action == "start":
            self.running = True
        elif action == "stop":
            self.running = False
        elif action == "reset":
            # new trial: same config and seed, fatigue carries over
            self.loop = ClosedLoop(self.config, fatigue=self.loop.fatigue)
        else:
            return _error_message("bad-control", f"unknown action {action!r}")
        return None

    def _on_weights(self, msg) -> str | None:
        w = msg.get("w")
        if (
            not isinstance(w, list)
            or len(w) != 4
            or not all(isinstance(v, (int, float)) and v > 0 for v in w)
        ):
            return _error_message("bad-weights", "w must be 4 positive numbers")
        self.loop.w_m = tuple(float(v) for v in w)
        return None


async def _serve_forever(config: SimConfig, port: int, host: str) -> None:
    server = SimServer(config, host=host, port=port)
    await server.start()
    print(f"serving on ws://{server.host}:{server.port} (mode: {config.mode})")
    try:
        await asyncio.Future()
    finally:
        await server.stop()


def serve(config: SimConfig, port: int, host: str = "127.0.0.1") -> None:
    """Run the real-time loop and protocol until interrupted."""
    try:
        asyncio.run(_serve_forever(config, port, host))
    except KeyboardInterrupt:
        pass
