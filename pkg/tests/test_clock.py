import time

import pytest

from oracleforge.clock import ClockError, RealtimeClock, VirtualClock, make_clock


def test_events_fire_in_time_order_with_fifo_ties():
    clock = VirtualClock()
    fired = []
    clock.call_at(2.0, lambda: fired.append("b"))
    clock.call_at(1.0, lambda: fired.append("a"))
    clock.call_at(2.0, lambda: fired.append("c"))
    clock.sleep(5)
    assert fired == ["a", "b", "c"]
    assert clock.now() == 5


def test_sleep_stops_at_target():
    clock = VirtualClock()
    fired = []
    clock.call_later(3, lambda: fired.append(clock.now()))
    clock.sleep(2.5)
    assert fired == [] and clock.now() == 2.5
    assert clock.step()
    assert fired == [3]
    assert not clock.step()


def test_past_events_are_clamped_to_now():
    clock = VirtualClock(start=10)
    times = []
    clock.call_at(4, lambda: times.append(clock.now()))
    clock.step()
    assert times == [10]


def test_callbacks_may_not_block():
    clock = VirtualClock()
    clock.call_later(1, lambda: clock.sleep(1))
    with pytest.raises(ClockError):
        clock.step()


def test_negative_durations_rejected():
    clock = VirtualClock()
    with pytest.raises(ValueError):
        clock.sleep(-1)
    with pytest.raises(ValueError):
        clock.call_later(-1, lambda: None)


def test_realtime_clock_really_waits():
    clock = RealtimeClock(speedup=10)
    start = time.monotonic()
    clock.sleep(0.5)
    assert time.monotonic() - start >= 0.045
    assert clock.now() == 0.5


def test_make_clock():
    assert type(make_clock("virtual")) is VirtualClock
    assert isinstance(make_clock("realtime"), RealtimeClock)
    with pytest.raises(ValueError):
        make_clock("sideways")
