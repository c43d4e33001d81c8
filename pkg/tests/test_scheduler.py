import pytest

from fswsim.interfaces import ST_CMD_MID, StFunctionCode
from fswsim.scheduler import ScheduleEntry, Scheduler
from fswsim.softbus import SoftwareBus


def collect(entries, ticks):
    bus = SoftwareBus()
    seen = []
    app = bus.register_app("SCHED")
    sub = bus.register_app("dev", lambda p, t: seen.append(
        (t, p.secondary.function_code, p.primary.sequence_count)))
    bus.subscribe(sub, ST_CMD_MID)
    sched = Scheduler(bus, app, entries)
    for t in range(ticks):
        bus.set_tick(t)
        sched.tick(t)
    return seen


def test_period_and_phase():
    seen = collect([ScheduleEntry(ST_CMD_MID, StFunctionCode.REQ_DATA, 10, 0),
                    ScheduleEntry(ST_CMD_MID, StFunctionCode.REQ_HK, 10, 5)], 30)
    data_ticks = [t for t, fc, _ in seen if fc == StFunctionCode.REQ_DATA]
    hk_ticks = [t for t, fc, _ in seen if fc == StFunctionCode.REQ_HK]
    assert data_ticks == [0, 10, 20]
    assert hk_ticks == [5, 15, 25]


def test_sequence_counter_per_mid_increments():
    seen = collect([ScheduleEntry(ST_CMD_MID, StFunctionCode.REQ_DATA, 5, 0)], 20)
    assert [seq for _, _, seq in seen] == [0, 1, 2, 3]


def test_entries_share_one_counter_per_target_mid():
    seen = collect([ScheduleEntry(ST_CMD_MID, StFunctionCode.REQ_DATA, 10, 0),
                    ScheduleEntry(ST_CMD_MID, StFunctionCode.REQ_HK, 10, 5)], 20)
    assert [seq for _, _, seq in seen] == [0, 1, 2, 3]


def test_invalid_entries_rejected():
    with pytest.raises(ValueError):
        ScheduleEntry(ST_CMD_MID, 0, 0)
    with pytest.raises(ValueError):
        ScheduleEntry(ST_CMD_MID, 0, 10, 10)
    with pytest.raises(ValueError):
        ScheduleEntry(ST_CMD_MID, 0, 10, -1)


def test_monotonic_tick_enforced():
    bus = SoftwareBus()
    app = bus.register_app("SCHED")
    sched = Scheduler(bus, app, [ScheduleEntry(ST_CMD_MID, 0, 10)])
    sched.tick(0)
    sched.tick(1)
    with pytest.raises(ValueError):
        sched.tick(1)
    with pytest.raises(ValueError):
        sched.tick(5)


def test_tick_returns_published_packets():
    bus = SoftwareBus()
    app = bus.register_app("SCHED")
    sched = Scheduler(bus, app, [ScheduleEntry(ST_CMD_MID, StFunctionCode.REQ_HK, 1)])
    out = sched.tick(0)
    assert len(out) == 1
    assert out[0].mid == ST_CMD_MID
    assert out[0].secondary.function_code == StFunctionCode.REQ_HK
