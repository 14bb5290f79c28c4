"""Fee schedule and gas accounting for the simulated chain."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .core import Effects, Transaction


@dataclass(frozen=True)
class GasSchedule:
    """Ethereum-style fee constants. Immutable for the lifetime of a chain."""

    tx_base: int = 21_000
    calldata_nonzero_byte: int = 68
    calldata_zero_byte: int = 4
    sstore_new: int = 20_000
    sstore_update: int = 5_000
    log_base: int = 375
    log_topic: int = 375
    log_data_byte: int = 8

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"gas constant {f.name} must be a non-negative int, got {value!r}")


def calldata_gas(payload: bytes, schedule: GasSchedule) -> int:
    zeros = payload.count(0)
    return zeros * schedule.calldata_zero_byte + (len(payload) - zeros) * schedule.calldata_nonzero_byte


def compute_gas(tx: Transaction, effects: Effects | None, schedule: GasSchedule) -> int:
    """Total gas charged for ``tx``.

    ``effects=None`` charges the base and calldata only, which is what a
    reverted transaction pays.
    """
    gas = schedule.tx_base + calldata_gas(tx.payload, schedule)
    if effects is None:
        return gas
    for write in effects.storage_writes:
        gas += schedule.sstore_new if write.is_new_slot else schedule.sstore_update
    for topics, data in effects.logs:
        gas += schedule.log_base + schedule.log_topic * len(topics) + schedule.log_data_byte * len(data)
    return gas + effects.execution_gas
