"""Deterministic in-process blockchain."""

from .core import (
    Block,
    ChainConfig,
    ChainError,
    ContractBehavior,
    Effects,
    EventDelivery,
    LogEvent,
    NonceGap,
    NonceTooLow,
    QueryError,
    Revert,
    SimulatedChain,
    StorageWrite,
    Subscription,
    Transaction,
    TransactionReceipt,
    TransactionRejected,
    UnknownContract,
    UnknownTransaction,
    address_for,
    digest,
)
from .gas import GasSchedule, calldata_gas, compute_gas

__all__ = [
    "Block", "ChainConfig", "ChainError", "ContractBehavior", "Effects", "EventDelivery", "GasSchedule",
    "LogEvent", "NonceGap", "NonceTooLow", "QueryError", "Revert", "SimulatedChain", "StorageWrite",
    "Subscription", "Transaction", "TransactionReceipt", "TransactionRejected", "UnknownContract",
    "UnknownTransaction", "address_for", "calldata_gas", "compute_gas", "digest",
]
