import pytest

from rampmerge.errors import DuplicateRegistration, UnknownVehicle
from rampmerge.infrastructure import (
    InfraRegistry,
    StatusMessage,
    handle_exit,
    in_range,
    register_entry,
    rolling_average,
)


def make_registry(rng=400.0):
    return InfraRegistry(infra_position=(0.0, 0.0), comm_range=rng)


def msg(vid, t=0.0, speed=5.0, vclass="ramp", position=(0.0, 0.0)):
    return StatusMessage(vehicle_id=vid, timestamp=t, speed=speed, accel=0.0,
                         position=position, vclass=vclass)


def test_in_range_inside():
    assert in_range(make_registry(), (399.0, 0.0))


def test_in_range_outside():
    assert not in_range(make_registry(), (401.0, 0.0))


def test_in_range_boundary_inclusive():
    # 3-4-5 triangle scaled to distance exactly 400
    assert in_range(make_registry(), (240.0, 320.0))


def test_register_ramp_entry():
    reg = make_registry()
    register_entry(reg, msg("ramp1", speed=5.0), distance_to_merge=267.0)
    record = reg.records["ramp1"]
    assert record.entry_distance == 267.0
    assert record.entry_speed == 5.0
    assert reg.entry_speed_windows["ramp"] == [(0.0, 5.0)]


def test_duplicate_registration_rejected():
    reg = make_registry()
    register_entry(reg, msg("ramp1"), 267.0)
    with pytest.raises(DuplicateRegistration):
        register_entry(reg, msg("ramp1"), 260.0)


def test_highway_entry_feeds_window():
    reg = make_registry()
    register_entry(reg, msg("hw1", speed=30.0, vclass="highway"), 400.0)
    avg = rolling_average(reg.entry_speed_windows["highway"], 60.0, 0.0, 25.0)
    assert avg == pytest.approx(30.0)


def test_exit_clears_record_and_sequence():
    reg = make_registry()
    register_entry(reg, msg("hw1", vclass="highway"), 400.0)
    reg.sequence_table["hw1"] = 1
    handle_exit(reg, "hw1")
    assert "hw1" not in reg.records
    assert "hw1" not in reg.sequence_table
    # entry-speed window survives the exit
    assert reg.entry_speed_windows["highway"]


def test_exit_unknown_vehicle():
    with pytest.raises(UnknownVehicle):
        handle_exit(make_registry(), "ghost")


def test_reentry_gets_fresh_record():
    reg = make_registry()
    register_entry(reg, msg("hw1", t=1.0, vclass="highway"), 400.0)
    handle_exit(reg, "hw1")
    register_entry(reg, msg("hw1", t=9.0, speed=28.0, vclass="highway"), 395.0)
    record = reg.records["hw1"]
    assert record.registered_at == 9.0
    assert record.entry_speed == 28.0


def test_rolling_average_mean():
    window = [(0.0, 28.0), (1.0, 30.0), (2.0, 32.0)]
    assert rolling_average(window, 60.0, 2.0, 5.0) == pytest.approx(30.0)


def test_rolling_average_empty_falls_back():
    assert rolling_average([], 60.0, 100.0, 5.0) == 5.0


def test_rolling_average_ages_out():
    window = [(0.0, 30.0), (50.0, 26.0), (55.0, 28.0)]
    assert rolling_average(window, 60.0, 61.0, 5.0) == pytest.approx(27.0)
