"""Per-vehicle longitudinal control.

Sequenced vehicles follow their assigned predecessor (physical or
different-lane ghost) with the consensus law; a time-to-collision check
against the radar-sensed physical leader supervises every consensus tick
and hands control to the internal car-following fallback below the bound.
Unsequenced vehicles cruise in CACC mode; baseline ramp vehicles run a
scripted or live driver model instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .dynamics import (
    MODE_CACC_CRUISE,
    MODE_CONSENSUS,
    MODE_DRIVER,
    MODE_FALLBACK,
    ActuationLimits,
    LeaderMeasurement,
    VehicleState,
    sense_leader,
)
from .errors import NonFiniteInput, ZeroGap


@dataclass(frozen=True)
class ConsensusGains:
    delta: float = 0.4  # 1/s^2, position-error gain
    gamma: float = 5.0  # s, speed-error weighting
    t_head_safe: float = 0.6  # s, desired time headway once sequenced
    s_head_safe: float = 25.0  # m, headway cap
    s_standstill: float = 3.0  # m, headway floor at rest


@dataclass(frozen=True)
class FallbackParams:
    """Intelligent-Driver-Model parameters for the internal controller."""

    a_f: float = 1.5  # m/s^2, maximum acceleration
    b: float = 2.0  # m/s^2, comfortable braking
    s0: float = 2.0  # m, standstill jam distance
    t_gap: float = 1.0  # s, desired time gap
    v0: float = 30.0  # m/s, desired speed


@dataclass(frozen=True)
class ControlCommand:
    accel: float  # m/s^2, already clamped to the actuation limits
    mode: str  # cacc-cruise | consensus-follow | fallback | driver
    ttc: float  # s, +inf when no closing physical leader


@dataclass(frozen=True)
class ControllerConfig:
    desired_speed: float = 30.0  # m/s, pre-merge string set speed
    cacc_time_gap: float = 0.5  # s, pre-sequencing string time gap
    leader_speed_gain: float = 0.4  # 1/s, proportional set-speed tracking
    ttc_bound: float = 2.0  # s, fail-safe engagement
    ttc_hysteresis: float = 0.5  # s, release margin above the bound
    radar_range: float = 150.0  # m
    merge_overlap: float = 60.0  # m of lane convergence before the merge
    limits: ActuationLimits = ActuationLimits()
    fallback: FallbackParams = FallbackParams()


@dataclass(frozen=True)
class PredecessorView:
    """Resolved sequence assignment for one control tick."""

    sequence_number: int
    predecessor: VehicleState | None  # None: leader slot or predecessor exited
    predecessor_exited: bool = False


def desired_headway(v_k: float, gains: ConsensusGains) -> float:
    """Desired center-to-center spacing: speed headway, capped and floored."""
    return max(gains.s_standstill, min(v_k * gains.t_head_safe, gains.s_head_safe))


def consensus_accel(
    s_k: float, v_k: float, s_p: float, v_p: float, gains: ConsensusGains
) -> float:
    """Consensus following law on signed stations (merge point at zero)."""
    for value in (s_k, v_k, s_p, v_p):
        if not math.isfinite(value):
            raise NonFiniteInput(f"consensus input {value!r}")
    s_head = desired_headway(v_k, gains)
    return -gains.delta * ((s_k - s_p + s_head) + gains.gamma * (v_k - v_p))


def project_ghost(pred: VehicleState, ego_path: str) -> VehicleState:
    """Virtual predecessor re-hosted on the ego lane.

    Stations are merge-point-relative on every path, so the longitudinal
    state carries over unchanged.
    """
    return replace(pred, path_id=ego_path)


def time_to_collision(v_k: float, measurement: LeaderMeasurement) -> float:
    """Gap over closing speed against the physical leader; +inf if opening."""
    if measurement.gap <= 0.0:
        raise ZeroGap(f"gap {measurement.gap:.3f} m")
    closing = v_k - measurement.leader_speed
    if closing <= 0.0:
        return math.inf
    return measurement.gap / closing


def fallback_accel(
    v_k: float, measurement: LeaderMeasurement, params: FallbackParams
) -> float:
    """Intelligent-Driver-Model car following (the internal controller)."""
    free_flow = 1.0 - (v_k / params.v0) ** 4
    if not measurement.present:
        return params.a_f * free_flow
    closing = v_k - measurement.leader_speed
    s_star = params.s0 + max(
        0.0,
        v_k * params.t_gap + v_k * closing / (2.0 * math.sqrt(params.a_f * params.b)),
    )
    gap = max(measurement.gap, 0.1)
    return params.a_f * (free_flow - (s_star / gap) ** 2)


def _speed_tracking(ego: VehicleState, cfg: ControllerConfig) -> float:
    return cfg.leader_speed_gain * (cfg.desired_speed - ego.speed)


def _cacc_cruise(
    ego: VehicleState,
    vehicles: dict[str, VehicleState],
    measurement: LeaderMeasurement,
    gains: ConsensusGains,
    cfg: ControllerConfig,
) -> float:
    """Pre-sequencing string behavior: follow the physical leader at the
    string time gap, or hold the set speed at the head of the string."""
    if not measurement.present:
        return _speed_tracking(ego, cfg)
    leader = vehicles[measurement.leader_id]
    string_gains = replace(gains, t_head_safe=cfg.cacc_time_gap)
    return consensus_accel(
        ego.station, ego.speed, leader.station, leader.speed, string_gains
    )


def controller_step(
    ego: VehicleState,
    vehicles: dict[str, VehicleState],
    assignment: PredecessorView | None,
    gains: ConsensusGains,
    cfg: ControllerConfig,
    fallback_latched: bool,
) -> tuple[ControlCommand, bool]:
    """One 10 Hz control decision for a protocol vehicle.

    Returns the command plus the fail-safe latch to carry to the next tick.
    The latch engages when the time-to-collision against the physical
    leader drops below the bound and releases above bound + hysteresis.
    """
    measurement = sense_leader(vehicles, ego, cfg.radar_range, cfg.merge_overlap)
    if not measurement.present:
        ttc = math.inf
    elif measurement.gap <= 0.0:
        # a converging-lane vehicle overlapping in station is not contact
        # yet (same-path contact halts the run upstream), but it is an
        # immediate hazard for the fail-safe
        ttc = 0.0
    else:
        ttc = time_to_collision(ego.speed, measurement)

    if fallback_latched:
        # release needs headroom beyond the bound AND a gap the consensus
        # law would not immediately close again; a time-to-collision test
        # alone releases at arbitrarily small gaps once speeds match
        settled_gap = desired_headway(ego.speed, gains)
        latched = ttc < cfg.ttc_bound + cfg.ttc_hysteresis or (
            measurement.present and measurement.gap < settled_gap
        )
    else:
        latched = ttc < cfg.ttc_bound
    if latched:
        accel = fallback_accel(ego.speed, measurement, cfg.fallback)
        return ControlCommand(cfg.limits.clamp_emergency(accel), MODE_FALLBACK, ttc), True

    if assignment is None:
        accel = _cacc_cruise(ego, vehicles, measurement, gains, cfg)
        return ControlCommand(cfg.limits.clamp(accel), MODE_CACC_CRUISE, ttc), False

    pred = assignment.predecessor
    if pred is None:
        # head of the sequence holds speed; a follower whose predecessor
        # exited the range degrades to string cruising on its radar leader
        accel = _cacc_cruise(ego, vehicles, measurement, gains, cfg)
        return ControlCommand(cfg.limits.clamp(accel), MODE_CACC_CRUISE, ttc), False

    target = pred if pred.path_id == ego.path_id else project_ghost(pred, ego.path_id)
    accel = consensus_accel(ego.station, ego.speed, target.station, target.speed, gains)
    return ControlCommand(cfg.limits.clamp(accel), MODE_CONSENSUS, ttc), False


# ---------------------------------------------------------------------------
# scripted and live driver models for the baseline ramp vehicle

DRIVER_CAUTIOUS = "cautious"
DRIVER_AGGRESSIVE = "aggressive"
DRIVER_HUMAN = "human"


@dataclass(frozen=True)
class DriverModel:
    kind: str
    accel: float = 1.0  # m/s^2, schedule acceleration
    target_speed: float = 22.0  # m/s
    sight_trigger: float = 60.0  # m before merge where the highway shows
    time_headway: float = 1.5  # s, gap-keeping headway once traffic is seen
    comfort_brake: float = 2.5  # m/s^2
    rear_clearance: float = 12.0  # m, refuses to complete a merge closer
    # than this to the vehicle it would cut in on


# four parameterizations standing in for four human subjects; sight
# distances allow roughly four seconds of speed adjustment before the merge
AGGRESSIVE_VARIANTS = (
    DriverModel(DRIVER_AGGRESSIVE, accel=2.5, target_speed=31.5, sight_trigger=110.0,
                time_headway=0.40, comfort_brake=3.0, rear_clearance=7.5),
    DriverModel(DRIVER_AGGRESSIVE, accel=2.2, target_speed=30.5, sight_trigger=100.0,
                time_headway=0.45, comfort_brake=2.8, rear_clearance=8.0),
    DriverModel(DRIVER_AGGRESSIVE, accel=2.5, target_speed=32.5, sight_trigger=120.0,
                time_headway=0.35, comfort_brake=3.2, rear_clearance=7.0),
    DriverModel(DRIVER_AGGRESSIVE, accel=2.1, target_speed=30.0, sight_trigger=95.0,
                time_headway=0.50, comfort_brake=2.6, rear_clearance=8.5),
)

CAUTIOUS_VARIANTS = (
    DriverModel(DRIVER_CAUTIOUS, accel=1.0, target_speed=22.0, sight_trigger=110.0,
                time_headway=1.8, comfort_brake=2.0, rear_clearance=20.0),
    DriverModel(DRIVER_CAUTIOUS, accel=0.8, target_speed=20.0, sight_trigger=105.0,
                time_headway=2.0, comfort_brake=2.0, rear_clearance=22.0),
    DriverModel(DRIVER_CAUTIOUS, accel=1.2, target_speed=24.0, sight_trigger=115.0,
                time_headway=1.6, comfort_brake=2.2, rear_clearance=18.0),
    DriverModel(DRIVER_CAUTIOUS, accel=0.9, target_speed=21.0, sight_trigger=100.0,
                time_headway=1.9, comfort_brake=2.0, rear_clearance=21.0),
)


def _perceived_leader(
    ego: VehicleState,
    vehicles: dict[str, VehicleState],
    model: DriverModel,
    cfg: ControllerConfig,
    highway_path: str,
) -> LeaderMeasurement:
    """What the driver reacts to: the same-lane radar leader, or, while
    still on the ramp past the sight trigger, the highway vehicle it must
    slot in behind.

    The slot target comes from projecting highway traffic to the driver's
    own merge-point arrival: the rearmost vehicle that will NOT be at
    least the driver's rear clearance behind the merge point by then is
    the one to follow; everything projecting further back will pass safely
    behind. Small clearances make the cut-in aggressive, large ones make
    the driver fall in at the back of the string.
    """
    measurement = sense_leader(vehicles, ego, cfg.radar_range, cfg.merge_overlap)
    if ego.path_id == highway_path or ego.station < -model.sight_trigger:
        return measurement
    # horizon capped so the slot choice stays stable while the driver
    # brakes (an uncapped estimate grows as the ego slows, endlessly
    # promoting vehicles from behind into the yield set)
    time_to_merge = min(max(-ego.station, 0.0) / max(ego.speed, 3.0), 3.0)
    best: VehicleState | None = None
    best_projection = math.inf
    for other in vehicles.values():
        if other.path_id != highway_path:
            continue
        projection = other.station + other.speed * time_to_merge
        if projection > -model.rear_clearance and projection < best_projection:
            best_projection = projection
            best = other
    if best is None:
        return measurement
    gap = best.station - ego.station - 0.5 * (best.length + ego.length)
    if measurement.present and measurement.gap < gap:
        return measurement
    return LeaderMeasurement(gap=gap, leader_speed=best.speed, present=True,
                             leader_id=best.id)


def driver_accel(
    model: DriverModel,
    t: float,
    ego: VehicleState,
    vehicles: dict[str, VehicleState],
    cfg: ControllerConfig,
    highway_path: str,
    held_command: float = 0.0,
) -> float:
    """Acceleration from a scripted or live driver.

    The live driver passes through the held pedal command. Cautious
    drivers accelerate on their schedule and yield smoothly to perceived
    traffic with an IDM-style envelope. Aggressive drivers tailgate with a
    bang-bang gap band (push until too close, brake until clear), which
    produces the characteristic speed fluctuations behind and around them;
    the IDM envelope still bounds them away from contact.
    """
    if model.kind == DRIVER_HUMAN:
        return held_command
    schedule = model.accel if ego.speed < model.target_speed else 0.0
    perceived = _perceived_leader(ego, vehicles, model, cfg, highway_path)
    if not perceived.present:
        return schedule
    envelope = fallback_accel(
        ego.speed,
        perceived,
        FallbackParams(
            a_f=max(model.accel, 0.1),
            b=model.comfort_brake,
            s0=2.0,
            t_gap=model.time_headway,
            v0=model.target_speed,
        ),
    )
    closing = ego.speed - perceived.leader_speed
    if perceived.gap <= 3.0 and closing < 0.0:
        # alongside a faster slot target: coast only if it will have
        # pulled a workable gap by the time the merge point arrives,
        # otherwise keep braking to drop behind it
        time_left = max(-ego.station, 0.0) / max(ego.speed, 3.0)
        projected_gap = perceived.gap - closing * time_left
        if projected_gap >= 3.0:
            envelope = max(envelope, 0.0)
    if model.kind == DRIVER_AGGRESSIVE:
        gap_low = 2.0 + ego.speed * model.time_headway
        gap_high = 6.0 + ego.speed * model.time_headway * 2.5
        # no gap-keeping brake while well below the target: right after
        # forcing a merge the driver powers out rather than settling back
        if (perceived.gap < gap_low and closing > -0.5
                and ego.speed > model.target_speed - 3.0):
            command = -model.comfort_brake
        elif perceived.gap <= gap_high:
            command = 0.0 if ego.speed > model.target_speed - 3.0 else model.accel
        else:
            command = _pedal_pump(model, t, ego.speed)
        # an aggressive driver tolerates tight front gaps: service braking
        # only, with full authority reserved for genuine closing threats
        if perceived.gap > 3.0 + max(0.0, closing):
            envelope = max(envelope, -model.comfort_brake)
        return min(command, envelope)
    return min(schedule, envelope)


PUMP_PERIOD = 6.0  # s
PUMP_PUSH = 4.0  # s of throttle per period
PUMP_EASE = -0.4  # m/s^2 during the ease phase


def _pedal_pump(model: DriverModel, t: float, speed: float) -> float:
    """Aggressive throttle habit: push past the target, ease off, repeat."""
    if speed < model.target_speed - 2.5:
        return model.accel
    if t % PUMP_PERIOD < PUMP_PUSH:
        return model.accel if speed < model.target_speed + 2.0 else 0.0
    return PUMP_EASE
