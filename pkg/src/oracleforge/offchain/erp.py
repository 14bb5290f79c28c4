"""In-memory ERP sink with idempotent intake."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from ..clock import VirtualClock
from .scans import ScanRecord


@dataclass(frozen=True)
class ErpMessage:
    source: tuple[str, int]
    record: ScanRecord
    received_at: float

    def to_json(self) -> dict:
        tx_hash, log_index = self.source
        return {"tx_hash": tx_hash, "log_index": log_index, "record": self.record.to_json(),
                "received_at": self.received_at}


def parse_delivery(body) -> tuple[tuple[str, int], ScanRecord]:
    """Validate a POST /erp/messages body. Raises ValueError when malformed."""
    if not isinstance(body, dict):
        raise ValueError("body must be a JSON object")
    missing = {"tx_hash", "log_index", "record"} - set(body)
    if missing:
        raise ValueError(f"missing keys {sorted(missing)}")
    tx_hash, log_index = body["tx_hash"], body["log_index"]
    if not isinstance(tx_hash, str) or not tx_hash:
        raise ValueError("tx_hash must be a non-empty string")
    if isinstance(log_index, bool) or not isinstance(log_index, int) or log_index < 0:
        raise ValueError("log_index must be a non-negative integer")
    return (tx_hash, log_index), ScanRecord.from_json(body["record"])


class ErpSink:
    def __init__(self, clock: VirtualClock):
        self.clock = clock
        self._lock = threading.Lock()
        self._messages: dict[tuple[str, int], ErpMessage] = {}
        self.replays = 0

    def receive(self, source: tuple[str, int], record: ScanRecord) -> bool:
        """Store the message; returns False for an already seen source."""
        with self._lock:
            if source in self._messages:
                self.replays += 1
                return False
            self._messages[source] = ErpMessage(source, record, self.clock.now())
            return True

    def dump(self) -> list[ErpMessage]:
        with self._lock:
            return list(self._messages.values())

    def __len__(self) -> int:
        return len(self._messages)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps([m.to_json() for m in self.dump()], indent=2))
