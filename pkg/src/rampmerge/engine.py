"""Deterministic fixed-step simulation engine.

Physics integrates at dt (default 0.02 s); controllers run every control
period (default 0.1 s) with zero-order hold between ticks; sorting runs
every sort period (default 5 s) aligned to control ticks. Sequence numbers
assigned at a sort tick become visible to controllers one control tick
later. Identical scenario and seed reproduce byte-identical logs.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field, replace

from . import geometry as geo
from .control import (
    ControlCommand,
    PredecessorView,
    controller_step,
    driver_accel,
)
from .dynamics import (
    CLASS_HIGHWAY,
    CLASS_RAMP,
    MODE_CACC_CRUISE,
    MODE_DRIVER,
    VehicleState,
    sense_leader,
    step_vehicle,
)
from .errors import ControllerPanic, InfeasibleSpawn
from .infrastructure import (
    InfraRegistry,
    StatusMessage,
    handle_exit,
    in_range,
    register_entry,
    update_status,
)
from .scenario import Scenario
from .sequencing import sort_tick

HARD_DECEL_THRESHOLD = -1.0  # m/s^2, edge-triggered deceleration event

TRAJECTORY_HEADER = "t,id,path,station_m,speed_mps,accel_mps2,mode,seq,ttc_s"


@dataclass(frozen=True)
class TrajectoryRecord:
    t: float
    vehicle_id: str
    path_id: str
    station: float
    speed: float
    accel: float  # commanded acceleration held from this tick
    mode: str
    seq: int | None
    ttc: float

    def to_line(self) -> str:
        seq = "" if self.seq is None else str(self.seq)
        return (
            f"{self.t:.6f},{self.vehicle_id},{self.path_id},{self.station:.6f},"
            f"{self.speed:.6f},{self.accel:.6f},{self.mode},{seq},{self.ttc:.6f}"
        )


@dataclass(frozen=True)
class SimSnapshot:
    """World copy published to the bridge after a fully applied step.

    `events` is the engine's append-only event list; consumers may read
    entries below `events_len` and must not mutate it.
    """

    t: float
    vehicles: tuple[VehicleState, ...]
    sequence_table: dict[str, int]
    events: list[dict]
    events_len: int
    merged: bool


@dataclass
class RunResult:
    scenario: Scenario
    paths: list[geo.PathGeometry]
    roster: list[str]
    rows: list[TrajectoryRecord] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    anchors: dict[str, float] = field(default_factory=dict)
    reason: str = "duration"
    safety: dict | None = None

    def trajectory_csv(self) -> str:
        lines = [TRAJECTORY_HEADER]
        lines.extend(row.to_line() for row in self.rows)
        return "\n".join(lines) + "\n"

    def events_ndjson(self) -> str:
        return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.events)


def resolve_paths(scenario: Scenario) -> list[geo.PathGeometry]:
    source = scenario.doc["geometry"]["source"]
    if source == "file":
        return geo.read_paths(scenario.doc["geometry"]["path"])
    return geo.default_paths()


def spawn(scenario: Scenario, rng: random.Random,
          paths: list[geo.PathGeometry]) -> list[tuple[float, VehicleState]]:
    """Seeded initial placement: the highway string upstream of the V2I
    range (front to back), then the ramp vehicle at the ramp start.

    Draws happen in fixed roster order: each highway vehicle's speed, then
    its spacing behind the previous one (the leader has no spacing draw).
    """
    highway = next(p for p in paths if p.kind == geo.HIGHWAY)
    ramp = next((p for p in paths if p.kind == geo.ON_RAMP), None)
    sp = scenario.doc["spawn"]
    length = scenario.doc["vehicle"]["length"]
    min_spacing = length + scenario.doc["gains"]["s_standstill"]
    coop = scenario.mode == "coop"

    out: list[tuple[float, VehicleState]] = []
    station = sp["leader_station"]
    for i in range(scenario.doc["highway_count"]):
        speed = rng.uniform(sp["speed_min"], sp["speed_max"])
        if i > 0:
            spacing = rng.uniform(sp["spacing_min"], sp["spacing_max"])
            if spacing < min_spacing:
                raise InfeasibleSpawn(
                    f"spacing {spacing:.2f} m below minimum {min_spacing:.2f} m"
                )
            station -= spacing
        out.append(
            (
                0.0,
                VehicleState(
                    id=f"hw{i + 1}",
                    path_id=highway.path_id,
                    station=station,
                    speed=speed,
                    accel=0.0,
                    length=length,
                    vclass=CLASS_HIGHWAY,
                    mode=MODE_CACC_CRUISE,
                    connected=True,
                ),
            )
        )
    if scenario.doc["ramp_count"] and ramp is not None:
        out.append(
            (
                scenario.doc["ramp_spawn_delay"],
                VehicleState(
                    id="ramp1",
                    path_id=ramp.path_id,
                    station=-ramp.merge_station,
                    speed=scenario.doc["ramp_initial_speed"],
                    accel=0.0,
                    length=length,
                    vclass=CLASS_RAMP,
                    mode=MODE_CACC_CRUISE if coop else MODE_DRIVER,
                    connected=coop,
                ),
            )
        )
    return out


class Engine:
    """Single-threaded simulation loop over one scenario."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.paths = resolve_paths(scenario)
        self.path_map = {p.path_id: p for p in self.paths}
        self.highway = next(p for p in self.paths if p.kind == geo.HIGHWAY)
        self.registry = InfraRegistry(
            infra_position=tuple(scenario.doc["v2i"]["infra_position"]),
            comm_range=scenario.doc["v2i"]["range"],
        )
        self.seq_params = scenario.sequencing_params()
        self.gains = scenario.gains()
        self.limits = scenario.limits()
        self.cfg = scenario.controller_config()
        self.driver = scenario.driver_model()
        rng = random.Random(scenario.seed)
        self.pending = spawn(scenario, rng, self.paths)
        self.roster = [state.id for _, state in self.pending]
        self.vehicles: dict[str, VehicleState] = {}
        self.held: dict[str, float] = {}
        self.latched: dict[str, bool] = {}
        self.held_pedal = 0.0
        self.result = RunResult(scenario=scenario, paths=self.paths, roster=self.roster)
        self.merged = False

    # -- helpers ------------------------------------------------------------

    def _position(self, state: VehicleState) -> geo.Point:
        path = self.path_map[state.path_id]
        lo, hi = path.station_bounds()
        return geo.point_at_station(path, min(max(state.station, lo), hi))

    def _event(self, t: float, kind: str, **payload) -> None:
        self.result.events.append({"t": round(t, 6), "kind": kind, **payload})

    def _spawn_due(self, t: float) -> None:
        remaining = []
        for spawn_time, state in self.pending:
            if spawn_time <= t + 1e-9:
                self.vehicles[state.id] = state
                self.held[state.id] = 0.0
                self.latched[state.id] = False
                self._event(t, "spawn", id=state.id, station=round(state.station, 6),
                            speed=round(state.speed, 6))
            else:
                remaining.append((spawn_time, state))
        self.pending = remaining

    def _v2i_transitions(self, t: float) -> None:
        for vid in sorted(self.vehicles):
            state = self.vehicles[vid]
            if not state.connected:
                continue
            position = self._position(state)
            inside = in_range(self.registry, position)
            registered = vid in self.registry.records
            msg = StatusMessage(
                vehicle_id=vid,
                timestamp=t,
                speed=state.speed,
                accel=state.accel,
                position=position,
                vclass=state.vclass,
            )
            if inside and not registered:
                register_entry(self.registry, msg, distance_to_merge=-state.station)
                self._event(t, "register", id=vid,
                            distance_to_merge=round(-state.station, 6),
                            speed=round(state.speed, 6))
            elif inside:
                update_status(self.registry, msg)
            elif registered:
                handle_exit(self.registry, vid)
                self._event(t, "exit", id=vid)

    def _update_anchors(self, t: float) -> None:
        # measurement windows anchor at the first control tick geometrically
        # inside V2I range, connected or not, so baselines stay comparable
        for vid in sorted(self.vehicles):
            if vid in self.result.anchors:
                continue
            state = self.vehicles[vid]
            if in_range(self.registry, self._position(state)):
                self.result.anchors[vid] = state.station
                self._event(t, "window_start", id=vid, station=round(state.station, 6))

    def _resolve_assignment(self, vid: str, table: dict[str, int],
                            snapshot: dict[str, VehicleState]) -> PredecessorView | None:
        seq = table.get(vid)
        if seq is None:
            return None
        if seq <= 1:
            return PredecessorView(sequence_number=seq, predecessor=None)
        holder = None
        for other, other_seq in table.items():
            if other_seq == seq - 1:
                holder = other
                break
        if holder is None or holder not in snapshot:
            return PredecessorView(sequence_number=seq, predecessor=None,
                                   predecessor_exited=True)
        return PredecessorView(sequence_number=seq, predecessor=snapshot[holder])

    def _control_tick(self, t: float, sort_due: bool, input_queue=None) -> None:
        self._spawn_due(t)
        if input_queue is not None:
            self._drain_inputs(input_queue)
        self._v2i_transitions(t)
        self._update_anchors(t)
        snapshot = dict(self.vehicles)
        table = dict(self.registry.sequence_table)
        if sort_due:
            assignments = sort_tick(self.registry, t, self.seq_params)
            if assignments:
                self._event(
                    t, "sort",
                    assignments=[
                        {
                            "id": a.vehicle_id,
                            "seq": a.sequence_number,
                            "predecessor": a.predecessor_id,
                            "eta": round(a.adjusted_eta, 6),
                        }
                        for a in assignments
                    ],
                )
        for vid in sorted(self.vehicles):
            state = self.vehicles[vid]
            try:
                if self.driver is not None and state.vclass == CLASS_RAMP:
                    accel = driver_accel(
                        self.driver, t, state, snapshot, self.cfg,
                        self.highway.path_id, self.held_pedal,
                    )
                    measurement = sense_leader(
                        snapshot, state, self.cfg.radar_range, self.cfg.merge_overlap
                    )
                    closing = state.speed - measurement.leader_speed
                    if measurement.present and measurement.gap <= 0.0:
                        ttc = 0.0
                    elif measurement.present and closing > 0.0:
                        ttc = measurement.gap / closing
                    else:
                        ttc = math.inf
                    command = ControlCommand(
                        self.limits.clamp_emergency(accel), MODE_DRIVER, ttc
                    )
                    latched = False
                else:
                    assignment = self._resolve_assignment(vid, table, snapshot)
                    command, latched = controller_step(
                        state, snapshot, assignment, self.gains, self.cfg,
                        self.latched[vid],
                    )
            except Exception as exc:
                raise ControllerPanic(vid, t, exc) from exc
            if command.mode != state.mode:
                self._event(t, "mode", id=vid, before=state.mode, after=command.mode)
            if (command.accel <= HARD_DECEL_THRESHOLD
                    and self.held[vid] > HARD_DECEL_THRESHOLD):
                self._event(t, "hard_decel", id=vid, accel=round(command.accel, 6))
            self.latched[vid] = latched
            self.held[vid] = command.accel
            self.vehicles[vid] = replace(state, mode=command.mode)
            self.result.rows.append(
                TrajectoryRecord(
                    t=t,
                    vehicle_id=vid,
                    path_id=state.path_id,
                    station=state.station,
                    speed=state.speed,
                    accel=command.accel,
                    mode=command.mode,
                    seq=table.get(vid),
                    ttc=command.ttc,
                )
            )

    def _drain_inputs(self, input_queue) -> None:
        # single consumer; the latest pedal command wins within a tick
        while True:
            try:
                accel = input_queue.get_nowait()
            except Exception:
                break
            self.held_pedal = accel

    def _integrate(self, t: float, dt: float) -> None:
        for vid in sorted(self.vehicles):
            self.vehicles[vid] = step_vehicle(
                self.vehicles[vid], self.held[vid], self.limits, dt
            )

    def _merge_events(self, t: float) -> None:
        for vid in sorted(self.vehicles):
            state = self.vehicles[vid]
            path = self.path_map[state.path_id]
            if path.kind == geo.ON_RAMP and state.station >= 0.0:
                self.vehicles[vid] = replace(state, path_id=self.highway.path_id)
                self.merged = True
                self._event(t, "merge", id=vid, station=round(state.station, 6),
                            speed=round(state.speed, 6))

    def _check_safety(self, t: float) -> bool:
        by_path: dict[str, list[VehicleState]] = {}
        for state in self.vehicles.values():
            by_path.setdefault(state.path_id, []).append(state)
        for states in by_path.values():
            states.sort(key=lambda s: s.station)
            for rear, front in zip(states, states[1:]):
                gap = front.station - rear.station - 0.5 * (front.length + rear.length)
                if gap <= 0.0:
                    info = {"rear": rear.id, "front": front.id, "gap": round(gap, 6)}
                    self.result.safety = {"t": round(t, 6), **info}
                    self._event(t, "safety_violation", **info)
                    return False
        return True

    def _all_complete(self) -> bool:
        if self.pending:
            return False
        window = self.scenario.measurement_distance
        for vid in self.roster:
            anchor = self.result.anchors.get(vid)
            if anchor is None:
                return False
            state = self.vehicles.get(vid)
            if state is None or state.station < anchor + window:
                return False
        return True

    # -- main loop ----------------------------------------------------------

    def run(self, input_queue=None, snapshot_cb=None, pace: float | None = None,
            stop_event=None) -> RunResult:
        dt = self.scenario.dt
        steps_per_control = self.scenario.control_every()
        sort_every = round(
            self.scenario.doc["sequencing"]["sort_period"]
            / self.scenario.doc["control"]["period"]
        )
        wall_start = time.monotonic()
        step = 0
        while True:
            t = step * dt
            if step % steps_per_control == 0:
                tick = step // steps_per_control
                if stop_event is not None and stop_event.is_set():
                    self.result.reason = "interrupted"
                    self._event(t, "partial_run")
                    break
                self._control_tick(t, sort_due=(tick % sort_every == 0), input_queue=input_queue)
                if t >= self.scenario.duration - 1e-9:
                    self.result.reason = "duration"
                    break
                if self._all_complete():
                    self.result.reason = "completed"
                    break
            if pace is not None:
                deadline = wall_start + (t + dt) / pace
                delay = deadline - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
            self._integrate(t, dt)
            step += 1
            t = step * dt
            self._merge_events(t)
            if not self._check_safety(t):
                self.result.reason = "safety_violation"
                break
            if snapshot_cb is not None:
                snapshot_cb(
                    SimSnapshot(
                        t=t,
                        vehicles=tuple(
                            self.vehicles[vid] for vid in sorted(self.vehicles)
                        ),
                        sequence_table=dict(self.registry.sequence_table),
                        events=self.result.events,
                        events_len=len(self.result.events),
                        merged=self.merged,
                    )
                )
        self._event(step * dt, "run_end", reason=self.result.reason)
        return self.result


def run(scenario: Scenario, **kwargs) -> RunResult:
    """Run one scenario to completion; see Engine.run for hooks."""
    return Engine(scenario).run(**kwargs)
