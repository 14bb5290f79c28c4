"""Simulation clocks.

Both clocks share one discrete-event scheduler. ``VirtualClock`` jumps
straight to the next due event; ``RealtimeClock`` sleeps the wall-clock gap
first. Timestamps handed out are always the scheduled simulated times, so
the two modes differ only in how long a run takes.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import threading
import time
from typing import Callable

logger = logging.getLogger(__name__)


class ClockError(RuntimeError):
    pass


class VirtualClock:
    """Deterministic event scheduler with a virtual timeline."""

    realtime = False

    def __init__(self, start: float = 0.0):
        self._now = float(start)
        self._queue: list[tuple[float, int, Callable[[], None]]] = []
        self._seq = itertools.count()
        self._firing = False
        self._lock = threading.RLock()

    def now(self) -> float:
        return self._now

    def call_at(self, when: float, callback: Callable[[], None]) -> None:
        with self._lock:
            heapq.heappush(self._queue, (max(when, self._now), next(self._seq), callback))

    def call_later(self, delay: float, callback: Callable[[], None]) -> None:
        if delay < 0:
            raise ValueError(f"negative delay {delay}")
        self.call_at(self._now + delay, callback)

    def next_event_time(self) -> float | None:
        with self._lock:
            return self._queue[0][0] if self._queue else None

    def pending_events(self) -> int:
        return len(self._queue)

    def step(self) -> bool:
        """Fire the earliest scheduled event. Returns False if none is queued."""
        with self._lock:
            if not self._queue:
                return False
            when, _, callback = heapq.heappop(self._queue)
            self._wait(when - self._now)
            self._now = when
            self._firing = True
            try:
                callback()
            finally:
                self._firing = False
            return True

    def advance_to(self, when: float) -> None:
        with self._lock:
            if self._firing:
                # Scheduled callbacks must never block; they would reorder time.
                raise ClockError("cannot advance the clock from inside a scheduled callback")
            while self._queue and self._queue[0][0] <= when:
                self.step()
            if when > self._now:
                self._wait(when - self._now)
                self._now = when

    def sleep(self, duration: float) -> None:
        if duration < 0:
            raise ValueError(f"negative sleep {duration}")
        self.advance_to(self._now + duration)

    def _wait(self, seconds: float) -> None:
        pass


class RealtimeClock(VirtualClock):
    """Same scheduler, but each advance really sleeps for the elapsed gap."""

    realtime = True

    def __init__(self, start: float = 0.0, speedup: float = 1.0):
        super().__init__(start)
        if speedup <= 0:
            raise ValueError("speedup must be positive")
        self.speedup = speedup

    def _wait(self, seconds: float) -> None:
        if seconds > 0:
            time.sleep(seconds / self.speedup)


def make_clock(mode: str) -> VirtualClock:
    if mode == "virtual":
        return VirtualClock()
    if mode == "realtime":
        return RealtimeClock()
    raise ValueError(f"unknown clock mode {mode!r}")
