from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, TypeVar

from ..clock import VirtualClock

logger = logging.getLogger(__name__)

T = TypeVar("T")


class RetryExhausted(Exception):
    def __init__(self, attempts: int, last_error: BaseException):
        super().__init__(f"gave up after {attempts} attempts: {last_error}")
        self.attempts = attempts
        self.last_error = last_error


@dataclass(frozen=True)
class RetryPolicy:
    """One initial attempt, then one retry per backoff entry.

    Delays are spent on the simulation clock, so outage windows and retry
    timing line up exactly in virtual mode.
    """

    backoff: tuple[float, ...] = (0.5, 1.0, 2.0)
    retry_on: tuple[type[BaseException], ...] = (ConnectionError,)

    @property
    def max_attempts(self) -> int:
        return 1 + len(self.backoff)

    def call(self, fn: Callable[[], T], clock: VirtualClock) -> T:
        for attempt, delay in enumerate((*self.backoff, None), start=1):
            try:
                return fn()
            except self.retry_on as exc:
                if delay is None:
                    raise RetryExhausted(attempt, exc) from exc
                logger.info("attempt %d failed (%s); retrying in %.2fs", attempt, exc, delay)
                clock.sleep(delay)
        raise AssertionError("unreachable")
