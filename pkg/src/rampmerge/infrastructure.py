"""Roadside infrastructure: V2I range volume, registration lifecycle,
per-vehicle records, and entry-speed windows."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .dynamics import CLASS_HIGHWAY, CLASS_RAMP
from .errors import DuplicateRegistration, UnknownVehicle
from .geometry import Point


@dataclass(frozen=True)
class StatusMessage:
    """Per-tick vehicle report collected over V2I."""

    vehicle_id: str
    timestamp: float  # s
    speed: float  # m/s
    accel: float  # m/s^2
    position: Point
    vclass: str  # highway | ramp


@dataclass
class VehicleRecord:
    """Everything the infrastructure keeps about one in-range vehicle."""

    latest: StatusMessage
    registered_at: float  # s
    entry_speed: float  # m/s, speed at the V2I communication starting point
    entry_distance: float  # m, distance to merge at registration (s_h or s_r)


@dataclass
class InfraRegistry:
    """Mutable infrastructure state, owned by the engine thread."""

    infra_position: Point
    comm_range: float  # m
    records: dict[str, VehicleRecord] = field(default_factory=dict)
    sequence_table: dict[str, int] = field(default_factory=dict)
    adjusted_eta: dict[str, float] = field(default_factory=dict)
    next_sequence: int = 1
    # (time, speed) entry observations per approach, for the rolling averages
    entry_speed_windows: dict[str, list[tuple[float, float]]] = field(
        default_factory=lambda: {CLASS_HIGHWAY: [], CLASS_RAMP: []}
    )

    def predecessor_of(self, vehicle_id: str) -> str | None:
        """Holder of the immediately preceding sequence number, if any."""
        seq = self.sequence_table.get(vehicle_id)
        if seq is None or seq <= 1:
            return None
        for other, other_seq in self.sequence_table.items():
            if other_seq == seq - 1:
                return other
        return None


def in_range(registry: InfraRegistry, position: Point) -> bool:
    """Euclidean range test against the communication volume (inclusive)."""
    return (
        math.hypot(
            position[0] - registry.infra_position[0],
            position[1] - registry.infra_position[1],
        )
        <= registry.comm_range
    )


def register_entry(
    registry: InfraRegistry, msg: StatusMessage, distance_to_merge: float
) -> None:
    """Create the record for a vehicle entering the communication range."""
    if msg.vehicle_id in registry.records:
        raise DuplicateRegistration(msg.vehicle_id)
    registry.records[msg.vehicle_id] = VehicleRecord(
        latest=msg,
        registered_at=msg.timestamp,
        entry_speed=msg.speed,
        entry_distance=distance_to_merge,
    )
    registry.entry_speed_windows[msg.vclass].append((msg.timestamp, msg.speed))


def update_status(registry: InfraRegistry, msg: StatusMessage) -> None:
    """Refresh the stored status of an already registered vehicle."""
    record = registry.records.get(msg.vehicle_id)
    if record is None:
        raise UnknownVehicle(msg.vehicle_id)
    record.latest = msg


def handle_exit(registry: InfraRegistry, vehicle_id: str) -> None:
    """Drop all stored information for a vehicle leaving the range."""
    if vehicle_id not in registry.records:
        raise UnknownVehicle(vehicle_id)
    del registry.records[vehicle_id]
    registry.sequence_table.pop(vehicle_id, None)
    registry.adjusted_eta.pop(vehicle_id, None)


def rolling_average(
    window: list[tuple[float, float]],
    horizon: float,
    now: float,
    default: float,
) -> float:
    """Mean of entry speeds newer than now - horizon; default when empty."""
    recent = [speed for (t, speed) in window if t > now - horizon]
    if not recent:
        return default
    return sum(recent) / len(recent)
