"""Longitudinal vehicle state, fixed-step kinematics, and front sensing."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import NonFiniteCommand

# control-mode tags
MODE_CACC_CRUISE = "cacc-cruise"
MODE_CONSENSUS = "consensus-follow"
MODE_FALLBACK = "fallback"
MODE_DRIVER = "driver"

CLASS_HIGHWAY = "highway"
CLASS_RAMP = "ramp"

DEFAULT_VEHICLE_LENGTH = 4.5  # m


@dataclass(frozen=True)
class ActuationLimits:
    a_max: float = 2.5  # m/s^2, comfort acceleration cap
    a_min: float = -4.0  # m/s^2, service deceleration cap
    a_emergency: float = -6.0  # m/s^2, full braking authority (fail-safe)

    def __post_init__(self):
        if not (self.a_min < 0.0 < self.a_max):
            raise ValueError("actuation limits require a_min < 0 < a_max")
        if self.a_emergency > self.a_min:
            raise ValueError("emergency braking must be at least the service cap")

    def clamp(self, accel: float) -> float:
        """Comfort envelope used by cooperative control."""
        return min(self.a_max, max(self.a_min, accel))

    def clamp_emergency(self, accel: float) -> float:
        """Full-authority envelope used by the fail-safe and drivers."""
        return min(self.a_max, max(self.a_emergency, accel))


@dataclass(frozen=True)
class VehicleState:
    """Longitudinal state of one vehicle on one path."""

    id: str
    path_id: str
    station: float  # m, signed, merge point at 0
    speed: float  # m/s, never negative
    accel: float  # m/s^2, applied during the current step
    length: float = DEFAULT_VEHICLE_LENGTH
    vclass: str = CLASS_HIGHWAY
    mode: str = MODE_CACC_CRUISE
    connected: bool = True


@dataclass(frozen=True)
class LeaderMeasurement:
    """Radar-surrogate view of the physical leader on the same path."""

    gap: float = 0.0  # m, bumper to bumper
    leader_speed: float = 0.0  # m/s
    present: bool = False
    leader_id: str | None = None


def step_vehicle(
    state: VehicleState,
    command: float,
    limits: ActuationLimits,
    dt: float,
) -> VehicleState:
    """Advance one physics step with the explicit kinematic update.

    The command is clamped to the actuation limits, then further clamped so
    the speed never goes negative within the step. Station advances by
    speed*dt + accel*dt^2/2 with the clamped acceleration.
    """
    if not math.isfinite(command):
        raise NonFiniteCommand(f"{state.id}: command {command!r}")
    accel = limits.clamp_emergency(command)
    if state.speed + accel * dt <= 0.0:
        accel = -state.speed / dt
        new_speed = 0.0
    else:
        new_speed = state.speed + accel * dt
    new_station = state.station + state.speed * dt + 0.5 * accel * dt * dt
    return replace(state, station=new_station, speed=new_speed, accel=accel)


def sense_leader(
    vehicles: dict[str, VehicleState],
    ego: VehicleState,
    radar_range: float,
    merge_overlap: float = 0.0,
) -> LeaderMeasurement:
    """Nearest vehicle ahead of ego on the same path within radar range.

    Gap is bumper to bumper: station difference minus half of both lengths.
    Within `merge_overlap` meters of the merge point the lanes physically
    converge, so a vehicle there is radar-visible from either path.
    """
    best: VehicleState | None = None
    for other in vehicles.values():
        if other.id == ego.id:
            continue
        if other.path_id != ego.path_id:
            if merge_overlap <= 0.0 or other.station < -merge_overlap:
                continue
        ahead = other.station - ego.station
        if ahead <= 0.0 or ahead > radar_range:
            continue
        if best is None or other.station < best.station:
            best = other
    if best is None:
        return LeaderMeasurement()
    gap = best.station - ego.station - 0.5 * (best.length + ego.length)
    return LeaderMeasurement(
        gap=gap, leader_speed=best.speed, present=True, leader_id=best.id
    )
