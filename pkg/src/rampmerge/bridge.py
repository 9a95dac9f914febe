"""Live wire between a running engine and the cockpit UI.

WebSocket text messages, JSON-encoded. A client opens with a hello
({"type": "hello", "role": "driver" | "spectator"}); exactly one driver
slot exists, later driver requests are demoted to spectator. The server
replies with a welcome carrying the static scene, then streams frames at a
fixed rate; the driver streams pedal messages back. See
docs/bridge-protocol.json for the message schemas.
"""

from __future__ import annotations

import asyncio
import json
import math
import queue
import threading
from dataclasses import dataclass

from . import geometry as geo
from .engine import Engine, RunResult, SimSnapshot
from .errors import OutOfRange
from .scenario import Scenario

FRAME_HZ = 20.0


@dataclass(frozen=True)
class PedalMapping:
    drive_max: float = 2.5  # m/s^2 at full throttle
    brake_max: float = 4.0  # m/s^2 at full brake


@dataclass(frozen=True)
class PedalMessage:
    throttle: float  # [0, 1]
    brake: float  # [0, 1]
    ts: float  # client timestamp, stale messages are ignored


def parse_pedals(payload: dict) -> PedalMessage:
    throttle = payload.get("throttle")
    brake = payload.get("brake")
    ts = payload.get("ts", 0.0)
    for name, value in (("throttle", throttle), ("brake", brake)):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise OutOfRange(f"pedals.{name}: expected a number")
        if not 0.0 <= float(value) <= 1.0:
            raise OutOfRange(f"pedals.{name}: {value} outside [0, 1]")
    if not isinstance(ts, (int, float)) or isinstance(ts, bool):
        raise OutOfRange("pedals.ts: expected a number")
    return PedalMessage(throttle=float(throttle), brake=float(brake), ts=float(ts))


def apply_pedals(msg: PedalMessage, mapping: PedalMapping) -> float:
    """Superpose both pedals into one longitudinal command."""
    return msg.throttle * mapping.drive_max - msg.brake * mapping.brake_max


def scene_document(paths: list[geo.PathGeometry], infra_position, comm_range) -> dict:
    return {
        "paths": [
            {
                "id": p.path_id,
                "kind": p.kind,
                "points": [[round(x, 3), round(y, 3)] for x, y in p.waypoints],
                "merge_station": round(p.merge_station, 3),
            }
            for p in paths
        ],
        "infra": {
            "x": infra_position[0],
            "y": infra_position[1],
            "range": comm_range,
        },
        "merge_point": [0.0, 0.0],
    }


def encode_frame(
    snapshot: SimSnapshot,
    path_map: dict[str, geo.PathGeometry],
    events_cursor: int,
) -> tuple[dict, int]:
    """FrameMessage for one snapshot plus the advanced event cursor."""
    vehicles = []
    for state in snapshot.vehicles:
        path = path_map[state.path_id]
        lo, hi = path.station_bounds()
        x, y = geo.point_at_station(path, min(max(state.station, lo), hi))
        vehicles.append(
            {
                "id": state.id,
                "path": state.path_id,
                "x": round(x, 3),
                "y": round(y, 3),
                "station": round(state.station, 3),
                "speed": round(state.speed, 3),
                "accel": round(state.accel, 3),
                "mode": state.mode,
                "seq": snapshot.sequence_table.get(state.id),
            }
        )
    events = snapshot.events[events_cursor:snapshot.events_len]
    frame = {
        "type": "frame",
        "t": round(snapshot.t, 4),
        "vehicles": vehicles,
        "events": events,
        "metrics": {
            "elapsed": round(snapshot.t, 4),
            "merged": snapshot.merged,
            "vehicles": len(vehicles),
        },
    }
    return frame, snapshot.events_len


class _Mailbox:
    """Latest-wins snapshot handoff from the engine thread."""

    def __init__(self):
        self._lock = threading.Lock()
        self._snapshot: SimSnapshot | None = None

    def put(self, snapshot: SimSnapshot) -> None:
        with self._lock:
            self._snapshot = snapshot

    def take(self) -> SimSnapshot | None:
        with self._lock:
            return self._snapshot


class BridgeServer:
    """Hosts one engine run and its socket clients.

    The engine runs on a worker thread paced to wall clock; pedal commands
    flow through a queue drained once per control tick; frames go out at
    FRAME_HZ from the freshest snapshot (frames may be dropped under load,
    never reordered).
    """

    def __init__(self, scenario: Scenario, port: int, host: str = "127.0.0.1",
                 pace: float = 1.0, frame_hz: float = FRAME_HZ):
        self.scenario = scenario
        self.port = port
        self.host = host
        self.pace = pace
        self.frame_hz = frame_hz
        self.engine = Engine(scenario)
        self.mapping = PedalMapping(
            drive_max=scenario.doc["pedals"]["drive_max"],
            brake_max=scenario.doc["pedals"]["brake_max"],
        )
        self.input_queue: queue.Queue[float] = queue.Queue()
        self.mailbox = _Mailbox()
        self.stop_event = threading.Event()
        self.result: RunResult | None = None
        self._driver = None
        self._clients = set()
        self._last_pedal_ts = -math.inf
        self._welcome_scene = scene_document(
            self.engine.paths,
            self.engine.registry.infra_position,
            self.engine.registry.comm_range,
        )

    # -- client handling ----------------------------------------------------

    async def _handler(self, ws):
        role = None
        try:
            raw = await ws.recv()
            hello = json.loads(raw)
            if hello.get("type") != "hello":
                await ws.send(json.dumps(
                    {"type": "error", "message": "expected hello"}))
                return
            wanted = hello.get("role", "spectator")
            if wanted == "driver" and self._driver is None:
                role = "driver"
                self._driver = ws
            else:
                role = "spectator"
                if wanted == "driver":
                    await ws.send(json.dumps(
                        {"type": "error",
                         "message": "driver slot taken; joining as spectator"}))
            await ws.send(json.dumps(
                {"type": "welcome", "role": role, "scene": self._welcome_scene}))
            self._clients.add(ws)
            async for raw in ws:
                if role != "driver":
                    continue
                try:
                    payload = json.loads(raw)
                except json.JSONDecodeError:
                    continue
                if payload.get("type") != "pedals":
                    continue
                try:
                    msg = parse_pedals(payload)
                except OutOfRange as exc:
                    await ws.send(json.dumps({"type": "error", "message": str(exc)}))
                    continue
                if msg.ts < self._last_pedal_ts:
                    continue
                self._last_pedal_ts = msg.ts
                self.input_queue.put(apply_pedals(msg, self.mapping))
        except Exception:
            pass
        finally:
            self._clients.discard(ws)
            if ws is self._driver:
                self._driver = None

    async def _broadcast_frames(self):
        import websockets

        cursor = 0
        last_t = -1.0
        interval = 1.0 / self.frame_hz
        while not self._engine_done.is_set():
            snapshot = self.mailbox.take()
            if snapshot is not None and snapshot.t > last_t:
                frame, cursor = encode_frame(snapshot, self.engine.path_map, cursor)
                last_t = snapshot.t
                text = json.dumps(frame)
                for ws in list(self._clients):
                    try:
                        await ws.send(text)
                    except websockets.ConnectionClosed:
                        self._clients.discard(ws)
            await asyncio.sleep(interval)

    def _run_engine(self):
        try:
            self.result = self.engine.run(
                input_queue=self.input_queue,
                snapshot_cb=self.mailbox.put,
                pace=self.pace,
                stop_event=self.stop_event,
            )
        finally:
            self._loop.call_soon_threadsafe(self._engine_done.set)

    async def serve(self):
        """Run until the engine finishes (or stop() is called)."""
        import websockets

        self._loop = asyncio.get_running_loop()
        self._engine_done = asyncio.Event()
        worker = threading.Thread(target=self._run_engine, daemon=True)
        async with websockets.serve(self._handler, self.host, self.port) as server:
            self.bound_port = server.sockets[0].getsockname()[1]
            worker.start()
            broadcaster = asyncio.create_task(self._broadcast_frames())
            await self._engine_done.wait()
            await broadcaster
            worker.join(timeout=5.0)

    def stop(self):
        """Request a graceful early finish; logs are flushed by the caller."""
        self.stop_event.set()
