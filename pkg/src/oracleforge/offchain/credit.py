"""Mock credit-assessment service."""

from __future__ import annotations

import json
import threading
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

from ..clock import VirtualClock

DEFAULT_THRESHOLD = 50


class ServiceUnavailable(ConnectionError):
    """The off-chain endpoint could not be reached."""


class NotFound(LookupError):
    pass


@dataclass(frozen=True)
class CreditProfile:
    tax_id: str
    name: str
    creditworthy: bool
    score: int

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, body: dict) -> CreditProfile:
        return cls(str(body["tax_id"]), str(body["name"]), bool(body["creditworthy"]), int(body["score"]))


def load_fixtures(path: str | Path | None = None) -> list[dict]:
    if path is None:
        text = resources.files("oracleforge.offchain").joinpath("data/credit_fixtures.json").read_text()
    else:
        text = Path(path).read_text()
    rows = json.loads(text)
    if not isinstance(rows, list):
        raise ValueError("credit fixtures must be a JSON array")
    return rows


class CreditService:
    """Serves seeded profiles; ``creditworthy`` is derived as score >= threshold.

    An outage window ``[outage_start, outage_start + outage_duration)`` on the
    shared clock makes every lookup fail with ``ServiceUnavailable``.
    """

    def __init__(self, fixtures: list[dict], clock: VirtualClock, threshold: int = DEFAULT_THRESHOLD,
                 outage_start: float | None = None, outage_duration: float = 0.0):
        self.clock = clock
        self.threshold = threshold
        self.outage_start = outage_start
        self.outage_duration = outage_duration
        self.lookups = 0
        self._lock = threading.Lock()
        self._profiles: dict[str, CreditProfile] = {}
        for row in fixtures:
            score = int(row["score"])
            if not 0 <= score <= 100:
                raise ValueError(f"score for {row['tax_id']} outside 0..100")
            if row["tax_id"] in self._profiles:
                raise ValueError(f"duplicate tax_id {row['tax_id']}")
            profile = CreditProfile(row["tax_id"], row["name"], score >= threshold, score)
            if "creditworthy" in row and bool(row["creditworthy"]) != profile.creditworthy:
                raise ValueError(f"fixture {row['tax_id']} contradicts the threshold {threshold}")
            self._profiles[profile.tax_id] = profile

    def tax_ids(self) -> list[str]:
        return sorted(self._profiles)

    def in_outage(self) -> bool:
        if self.outage_start is None:
            return False
        now = self.clock.now()
        return self.outage_start <= now < self.outage_start + self.outage_duration

    def lookup(self, tax_id: str) -> CreditProfile:
        with self._lock:
            self.lookups += 1
        if self.in_outage():
            raise ServiceUnavailable("credit service unavailable")
        try:
            return self._profiles[tax_id]
        except KeyError:
            raise NotFound(tax_id) from None
