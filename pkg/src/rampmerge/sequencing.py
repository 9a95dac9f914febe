"""Vehicle sequencing: merging-point arrival estimates, merge-speed regime
selection, headway adjustment, tie-breaking, and sequence-number assignment.

Arrival estimates assume a simplified profile: adjust speed toward the
estimated merging speed at the comfort acceleration bound, then cruise.
Estimated arrival times are absolute (time of day), so batches sorted at
different ticks stay comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .dynamics import CLASS_HIGHWAY, CLASS_RAMP
from .errors import InvalidSpeeds, NonPositiveSpeed
from .infrastructure import InfraRegistry, rolling_average

REGIME_HIGHWAY_AVG = "v_hs_avg"
REGIME_RAMP_MAX = "v_rm_max"


@dataclass(frozen=True)
class SequencingParams:
    v_lim: float = 30.0  # m/s, highway speed limit
    a_max: float = 2.5  # m/s^2, comfort acceleration assumed by the estimates
    t_head_safe: float = 1.0  # s, enforced arrival-time separation
    sort_period: float = 5.0  # s
    horizon: float = 60.0  # s, entry-speed window
    tie_epsilon: float = 0.05  # s, "equal arrival time" tolerance
    default_highway_speed: float = 30.0  # m/s, fallback when no entries yet
    default_ramp_speed: float = 5.0  # m/s, fallback when no entries yet
    ramp_length: float = 267.0  # m, fallback s_r before any ramp entry


@dataclass(frozen=True)
class MergeRegime:
    kind: str  # REGIME_HIGHWAY_AVG | REGIME_RAMP_MAX
    v_m: float  # m/s, estimated merging speed
    v_rm_max: float  # m/s
    v_hs_avg: float  # m/s
    v_rs_avg: float  # m/s


@dataclass
class EtaEstimate:
    vehicle_id: str
    raw_eta: float  # s, absolute arrival time before adjustment
    approach: str  # highway | ramp
    registered_at: float = 0.0  # s, orders same-lane vehicles front to back
    adjusted_eta: float = field(default=0.0)

    def __post_init__(self):
        if self.adjusted_eta < self.raw_eta:
            self.adjusted_eta = self.raw_eta


@dataclass(frozen=True)
class SequenceAssignment:
    vehicle_id: str
    sequence_number: int
    predecessor_id: str | None
    adjusted_eta: float
    approach: str


def accel_distance(v_from: float, v_to: float, a_max: float) -> float:
    """Distance to accelerate from v_from to v_to at a_max."""
    if v_to < v_from:
        raise InvalidSpeeds(f"v_to {v_to} < v_from {v_from}")
    return (v_to * v_to - v_from * v_from) / (2.0 * a_max)


def max_reachable_speed(v_rs_avg: float, s_r: float, params: SequencingParams) -> float:
    """Highest speed a ramp vehicle can carry into the merge point.

    The speed limit is reachable iff the acceleration distance fits within
    s_r; otherwise the vehicle is still accelerating at the merge.
    """
    v_start = min(v_rs_avg, params.v_lim)
    if accel_distance(v_start, params.v_lim, params.a_max) <= s_r:
        return params.v_lim
    return math.sqrt(v_start * v_start + 2.0 * params.a_max * s_r)


def merge_speed(v_rm_max: float, v_hs_avg: float) -> float:
    """Estimated merging speed: the lower of reachable and highway average."""
    return min(v_rm_max, v_hs_avg)


def choose_regime(
    v_rs_avg: float, v_hs_avg: float, s_r: float, params: SequencingParams
) -> MergeRegime:
    """Pick the arrival-estimate regime from the approach averages.

    Entry speeds above the limit are clamped for estimation purposes, as
    for the per-vehicle speeds. Ties go to the highway-average regime: when
    the reachable speed is the capped speed limit, the ramp vehicle cruises
    after reaching it, which is the highway-average-style profile.
    """
    v_hs = min(v_hs_avg, params.v_lim)
    v_rs = min(v_rs_avg, params.v_lim)
    v_rm = max_reachable_speed(v_rs, s_r, params)
    v_m = merge_speed(v_rm, v_hs)
    kind = REGIME_HIGHWAY_AVG if v_hs <= v_rm else REGIME_RAMP_MAX
    return MergeRegime(
        kind=kind, v_m=v_m, v_rm_max=v_rm, v_hs_avg=v_hs, v_rs_avg=v_rs
    )


def _adjust_then_cruise(v0: float, v_target: float, a_max: float, distance: float) -> float:
    """Time to cover `distance` adjusting from v0 to v_target at +/-a_max,
    then cruising at v_target.

    When the adjust phase alone overruns the distance, the crossing happens
    inside it and the cruise never starts. A vehicle that would come to rest
    before covering the distance never arrives (infinite estimate).
    """
    if abs(v_target - v0) < 1e-12:
        return distance / v0 if v0 > 0.0 else math.inf
    a = a_max if v_target > v0 else -a_max
    t_adjust = (v_target - v0) / a
    d_adjust = 0.5 * (v0 + v_target) * t_adjust
    if d_adjust < distance:
        if v_target <= 0.0:
            return math.inf
        return t_adjust + (distance - d_adjust) / v_target
    # crossing within the adjust phase: solve v0 t + a t^2 / 2 = distance
    disc = v0 * v0 + 2.0 * a * distance
    return (-v0 + math.sqrt(disc)) / a


def eta_highway(
    v_hs_i: float, s_h: float, regime: MergeRegime, params: SequencingParams
) -> float:
    """Estimated time for a highway vehicle to reach the merge point.

    Highway-average regime: cruise at the entry speed. Ramp-max regime:
    adjust to the reachable merge speed at a_max, then cruise at it.
    """
    if v_hs_i <= 0.0:
        raise NonPositiveSpeed(f"v_hs_i {v_hs_i}")
    v = min(v_hs_i, params.v_lim)
    if regime.kind == REGIME_HIGHWAY_AVG:
        return s_h / v
    return _adjust_then_cruise(v, regime.v_rm_max, params.a_max, s_h)


def eta_ramp(
    v_rs_j: float, s_r: float, regime: MergeRegime, params: SequencingParams
) -> float:
    """Estimated time for a ramp vehicle to reach the merge point.

    Highway-average regime: accelerate to the highway average, then cruise.
    Ramp-max regime: accelerate at a_max throughout the ramp.
    """
    v = min(max(v_rs_j, 0.0), params.v_lim)
    if regime.kind == REGIME_HIGHWAY_AVG:
        return _adjust_then_cruise(v, regime.v_hs_avg, params.a_max, s_r)
    disc = v * v + 2.0 * params.a_max * s_r
    return (-v + math.sqrt(disc)) / params.a_max


def adjust_and_sort(
    batch: list[EtaEstimate],
    existing: list[SequenceAssignment],
    params: SequencingParams,
    start_number: int = 1,
) -> list[SequenceAssignment]:
    """Adjust batch arrival times, sort, and assign sequence numbers.

    Rules, applied to a fixed point (each only raises arrival times):
    same-lane followers are pushed t_head_safe behind their physical
    predecessor's adjusted time; a ramp vehicle tied with a highway vehicle
    yields and is pushed t_head_safe behind it. Numbers continue after all
    previously assigned ones and never renumber existing vehicles.
    """
    if not batch:
        return []
    adjusted = {e.vehicle_id: max(e.adjusted_eta, e.raw_eta) for e in batch}
    raw = {e.vehicle_id: e.raw_eta for e in batch}
    # front-to-back per lane: earlier registration means physically ahead
    lanes: dict[str, list[EtaEstimate]] = {}
    for est in sorted(batch, key=lambda e: (e.registered_at, e.raw_eta, e.vehicle_id)):
        lanes.setdefault(est.approach, []).append(est)
    # adjusted time of the rearmost already-sequenced vehicle per lane
    lane_tail: dict[str, float] = {}
    for assignment in sorted(existing, key=lambda a: a.sequence_number):
        lane_tail[assignment.approach] = assignment.adjusted_eta

    for _ in range(len(batch) + 2):
        changed = False
        for lane, members in lanes.items():
            prev = lane_tail.get(lane)
            for est in members:
                vid = est.vehicle_id
                floor = raw[vid] if prev is None else max(raw[vid], prev + params.t_head_safe)
                if floor > adjusted[vid]:
                    adjusted[vid] = floor
                    changed = True
                prev = adjusted[vid]
        ramps = lanes.get(CLASS_RAMP, [])
        highways = lanes.get(CLASS_HIGHWAY, [])
        for ramp_est in ramps:
            for hw_est in highways:
                hw_adj = adjusted[hw_est.vehicle_id]
                if abs(adjusted[ramp_est.vehicle_id] - hw_adj) < params.tie_epsilon:
                    adjusted[ramp_est.vehicle_id] = hw_adj + params.t_head_safe
                    changed = True
        if not changed:
            break

    ordering = sorted(
        batch,
        key=lambda e: (
            adjusted[e.vehicle_id],
            0 if e.approach == CLASS_HIGHWAY else 1,
            e.vehicle_id,
        ),
    )
    number = max([a.sequence_number for a in existing] + [start_number - 1]) + 1
    holders = {a.sequence_number: a.vehicle_id for a in existing}
    out = []
    for est in ordering:
        out.append(
            SequenceAssignment(
                vehicle_id=est.vehicle_id,
                sequence_number=number,
                predecessor_id=holders.get(number - 1),
                adjusted_eta=adjusted[est.vehicle_id],
                approach=est.approach,
            )
        )
        holders[number] = est.vehicle_id
        number += 1
    return out


def sort_tick(
    registry: InfraRegistry, now: float, params: SequencingParams
) -> list[SequenceAssignment]:
    """One sorting pass: estimate arrivals for unsequenced registered
    vehicles from their entry-time state, then extend the sequence table.

    Already-sequenced vehicles are never renumbered. Returns the new
    assignments (empty when nothing was waiting).
    """
    v_hs_avg = rolling_average(
        registry.entry_speed_windows[CLASS_HIGHWAY],
        params.horizon,
        now,
        params.default_highway_speed,
    )
    v_rs_avg = rolling_average(
        registry.entry_speed_windows[CLASS_RAMP],
        params.horizon,
        now,
        params.default_ramp_speed,
    )
    ramp_entries = [
        rec.entry_distance
        for rec in registry.records.values()
        if rec.latest.vclass == CLASS_RAMP and rec.entry_distance > 0.0
    ]
    s_r_ref = sum(ramp_entries) / len(ramp_entries) if ramp_entries else params.ramp_length
    regime = choose_regime(v_rs_avg, v_hs_avg, s_r_ref, params)

    batch = []
    for vid, rec in registry.records.items():
        if vid in registry.sequence_table or rec.entry_distance <= 0.0:
            continue
        if rec.latest.vclass == CLASS_HIGHWAY:
            interval = eta_highway(
                max(rec.entry_speed, 1e-6), rec.entry_distance, regime, params
            )
        else:
            interval = eta_ramp(rec.entry_speed, rec.entry_distance, regime, params)
        batch.append(
            EtaEstimate(
                vehicle_id=vid,
                raw_eta=rec.registered_at + interval,
                approach=rec.latest.vclass,
                registered_at=rec.registered_at,
            )
        )

    existing = [
        SequenceAssignment(
            vehicle_id=vid,
            sequence_number=seq,
            predecessor_id=None,
            adjusted_eta=registry.adjusted_eta.get(vid, -math.inf),
            approach=registry.records[vid].latest.vclass,
        )
        for vid, seq in registry.sequence_table.items()
    ]
    assignments = adjust_and_sort(batch, existing, params, registry.next_sequence)
    for assignment in assignments:
        registry.sequence_table[assignment.vehicle_id] = assignment.sequence_number
        registry.adjusted_eta[assignment.vehicle_id] = assignment.adjusted_eta
        registry.next_sequence = assignment.sequence_number + 1
    return assignments
