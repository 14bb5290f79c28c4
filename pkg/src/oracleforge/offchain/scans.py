"""QR scan feed: already-decoded scan fields."""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from typing import Iterator

ITEM_CATALOG = (
    "steel bolts",
    "hex nuts",
    "copper wire",
    "ball bearings",
    "rivets",
    "aluminium sheets",
    "gaskets",
    "hydraulic hoses",
    "washers",
    "circuit boards",
    "pvc pipes",
    "spring coils",
)


@dataclass(frozen=True)
class ScanRecord:
    """A scanned delivery. ``location`` and ``scanned_at`` are enrichment
    fields and stay None until an oracle controller fills them in."""

    order_id: int
    item_name: str
    quantity: int
    location: str | None = None
    scanned_at: float | None = None

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, body: dict) -> ScanRecord:
        if not isinstance(body, dict):
            raise ValueError("record must be an object")
        unknown = set(body) - {"order_id", "item_name", "quantity", "location", "scanned_at"}
        if unknown:
            raise ValueError(f"unknown record fields {sorted(unknown)}")
        order_id, quantity = body.get("order_id"), body.get("quantity")
        item_name = body.get("item_name")
        for name, value in (("order_id", order_id), ("quantity", quantity)):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"{name} must be an integer")
        if not isinstance(item_name, str):
            raise ValueError("item_name must be a string")
        location = body.get("location")
        scanned_at = body.get("scanned_at")
        if location is not None and not isinstance(location, str):
            raise ValueError("location must be a string")
        if scanned_at is not None and (isinstance(scanned_at, bool) or not isinstance(scanned_at, (int, float))):
            raise ValueError("scanned_at must be a number")
        return cls(order_id, item_name, quantity, location, None if scanned_at is None else float(scanned_at))


def emit_scans(n: int, seed: int) -> Iterator[ScanRecord]:
    """Deterministic stream of ``n`` valid raw scans."""
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = random.Random(seed)
    for _ in range(n):
        yield ScanRecord(
            order_id=rng.randint(1, 1_000_000),
            item_name=rng.choice(ITEM_CATALOG),
            quantity=rng.randint(1, 5_000),
        )
