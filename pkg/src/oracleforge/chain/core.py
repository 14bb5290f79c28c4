"""In-process simulated blockchain.

Contracts are modeled as declared-effect handlers (no bytecode). Blocks are
mined by a self-rescheduling process on the shared clock: mining of a block
starts with a snapshot of the mempool, runs for an exponentially distributed
interval, and the block carries the timestamp of the moment mining began.
Transactions that arrive while a block is being mined wait for the next one.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from collections import deque
from dataclasses import dataclass, field, fields
from typing import Any, Mapping

from ..clock import VirtualClock, make_clock
from .gas import GasSchedule, compute_gas
from .sampling import InterblockSampler, LatencySampler, spawn_streams

logger = logging.getLogger(__name__)

ZERO_HASH = "0x" + "00" * 32


class ChainError(Exception):
    pass


class TransactionRejected(ChainError):
    pass


class UnknownContract(TransactionRejected):
    pass


class NonceGap(TransactionRejected):
    pass


class NonceTooLow(TransactionRejected):
    pass


class UnknownTransaction(ChainError):
    pass


class QueryError(ChainError):
    """A read-only call was rejected by the contract handler."""


class Revert(Exception):
    """Raised by a contract handler to reject a payload."""


def digest(data: bytes) -> str:
    return "0x" + hashlib.sha3_256(data).hexdigest()


def address_for(name: str) -> str:
    return "0x" + hashlib.sha3_256(f"address:{name}".encode()).hexdigest()[:40]


@dataclass(frozen=True)
class ChainConfig:
    seed: int = 0
    mean_interblock: float = 13.0
    submit_latency_mean: float = 0.50
    submit_latency_std: float = 0.05
    submit_latency_min: float = 0.46
    read_latency_mean: float = 0.12
    read_latency_std: float = 0.02
    read_latency_min: float = 0.11
    event_propagation_mean: float = 0.5
    event_propagation_std: float = 0.05
    event_propagation_min: float = 0.45
    tail_probability: float = 0.02
    tail_multiplier_max: float = 4.5
    clock_mode: str = "virtual"

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        for f in fields(self):
            if f.name in ("seed", "clock_mode", "tail_probability"):
                continue
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or value <= 0:
                raise ValueError(f"{f.name} must be strictly positive, got {value!r}")
        if not 0.0 <= self.tail_probability < 1.0:
            raise ValueError("tail_probability must be in [0, 1)")
        if self.clock_mode not in ("virtual", "realtime"):
            raise ValueError(f"clock_mode must be 'virtual' or 'realtime', got {self.clock_mode!r}")


@dataclass(frozen=True)
class Transaction:
    sender: str
    to: str
    payload: bytes
    gas_price: int
    nonce: int

    def __post_init__(self):
        if self.nonce < 0 or self.gas_price < 0:
            raise ValueError("nonce and gas_price must be non-negative")

    def canonical(self) -> bytes:
        return json.dumps([self.sender, self.to, self.payload.hex(), self.gas_price, self.nonce],
                          separators=(",", ":")).encode()

    @property
    def hash(self) -> str:
        return digest(self.canonical())


@dataclass(frozen=True)
class StorageWrite:
    slot: str
    is_new_slot: bool
    value: Any


@dataclass(frozen=True)
class Effects:
    storage_writes: tuple[StorageWrite, ...] = ()
    logs: tuple[tuple[tuple[str, ...], bytes], ...] = ()
    execution_gas: int = 0
    return_data: bytes = b""
    state_update: Mapping[str, Any] = field(default_factory=dict)


class ContractBehavior:
    """Base for modeled contracts.

    ``execute`` must be a pure function of ``(payload, state)``; the chain
    applies the returned effects. Raise ``Revert`` to reject a payload.
    """

    name = "contract"

    def __init__(self, address: str | None = None):
        self.address = address or address_for(self.name)

    def execute(self, payload: bytes, state: Mapping[str, Any]) -> Effects:
        raise NotImplementedError


@dataclass(frozen=True)
class LogEvent:
    contract: str
    topics: tuple[str, ...]
    data: bytes
    block_number: int
    tx_hash: str
    log_index: int

    @property
    def position(self) -> tuple[int, int]:
        return (self.block_number, self.log_index)


@dataclass(frozen=True)
class TransactionReceipt:
    tx_hash: str
    block_number: int
    block_timestamp: float
    gas_used: int
    status: str
    logs: tuple[LogEvent, ...] = ()


@dataclass(frozen=True)
class Block:
    number: int
    timestamp: float
    parent_hash: str
    transactions: tuple[str, ...]
    hash: str


@dataclass(frozen=True)
class EventDelivery:
    event: LogEvent
    received_at: float


class Subscription:
    """Ordered inbox of matching events for one subscriber."""

    def __init__(self, chain: SimulatedChain, address: str | None, first_topic: str | None):
        self.chain = chain
        self.address = address
        self.first_topic = first_topic
        self.active = True
        self._inbox: deque[EventDelivery] = deque()
        self._last_position: tuple[int, int] = (-1, -1)

    def matches(self, event: LogEvent) -> bool:
        if self.address is not None and event.contract != self.address:
            return False
        if self.first_topic is not None and (not event.topics or event.topics[0] != self.first_topic):
            return False
        return True

    def _deliver(self, event: LogEvent, received_at: float) -> None:
        if not self.active or event.position <= self._last_position:
            return
        self._last_position = event.position
        self._inbox.append(EventDelivery(event, received_at))

    def poll(self) -> list[EventDelivery]:
        items = list(self._inbox)
        self._inbox.clear()
        return items

    def __len__(self) -> int:
        return len(self._inbox)

    def cancel(self) -> None:
        self.active = False
        self.chain._unsubscribe(self)


class SimulatedChain:
    def __init__(self, config: ChainConfig | None = None, clock: VirtualClock | None = None,
                 schedule: GasSchedule | None = None, auto_mine: bool = True):
        self.config = config or ChainConfig()
        self.clock = clock or make_clock(self.config.clock_mode)
        self.schedule = schedule or GasSchedule()
        self.auto_mine = auto_mine
        self._lock = threading.RLock()

        streams = spawn_streams(self.config.seed)
        c = self.config
        self._interblock = InterblockSampler(streams["interblock"], c.mean_interblock)
        self._submit_latency = LatencySampler(streams["submit"], c.submit_latency_mean, c.submit_latency_std,
                                              c.submit_latency_min, c.tail_probability, c.tail_multiplier_max)
        self._read_latency = LatencySampler(streams["read"], c.read_latency_mean, c.read_latency_std,
                                            c.read_latency_min, c.tail_probability, c.tail_multiplier_max)
        self._propagation = LatencySampler(streams["propagation"], c.event_propagation_mean,
                                           c.event_propagation_std, c.event_propagation_min)

        self._contracts: dict[str, ContractBehavior] = {}
        self._state: dict[str, dict[str, Any]] = {}
        self._storage: dict[str, set[str]] = {}
        self._mempool: list[Transaction] = []
        self._known: dict[str, Transaction] = {}
        self._receipts: dict[str, TransactionReceipt] = {}
        self._nonces: dict[str, int] = {}
        self._events: list[LogEvent] = []
        self._subscribers: list[Subscription] = []
        self._pending_deliveries = 0
        self._last_delivery_at = float("-inf")
        self._building: tuple[float, list[Transaction]] | None = None

        genesis = Block(0, self.clock.now(), ZERO_HASH, (), digest(b"genesis"))
        self._blocks: list[Block] = [genesis]
        if auto_mine:
            self._begin_block()

    # -- deployment and inspection -------------------------------------

    def deploy(self, behavior: ContractBehavior) -> str:
        with self._lock:
            if behavior.address in self._contracts:
                raise ChainError(f"address {behavior.address} already has a contract")
            self._contracts[behavior.address] = behavior
            self._state[behavior.address] = {}
            self._storage[behavior.address] = set()
            return behavior.address

    @property
    def blocks(self) -> tuple[Block, ...]:
        return tuple(self._blocks)

    @property
    def head(self) -> Block:
        return self._blocks[-1]

    def block(self, number: int) -> Block:
        return self._blocks[number]

    def state_of(self, address: str) -> dict[str, Any]:
        return dict(self._state[address])

    @property
    def events(self) -> tuple[LogEvent, ...]:
        return tuple(self._events)

    def pending_transactions(self) -> int:
        building = len(self._building[1]) if self._building else 0
        return len(self._mempool) + building

    def is_quiescent(self) -> bool:
        """No transaction waits for inclusion and every event has been delivered."""
        return self.pending_transactions() == 0 and self._pending_deliveries == 0

    def next_nonce(self, sender: str) -> int:
        return self._nonces.get(sender, 0)

    # -- transactions ----------------------------------------------------

    def submit_transaction(self, tx: Transaction) -> str:
        """Send ``tx`` to the node; blocks for one sampled submission round trip."""
        with self._lock:
            if tx.to not in self._contracts:
                raise UnknownContract(f"no contract registered at {tx.to}")
            expected = self.next_nonce(tx.sender)
            if tx.nonce > expected:
                raise NonceGap(f"nonce {tx.nonce} for {tx.sender}, expected {expected}")
            if tx.nonce < expected:
                raise NonceTooLow(f"nonce {tx.nonce} for {tx.sender} already used (next is {expected})")
            self._nonces[tx.sender] = expected + 1
            tx_hash = tx.hash
            self._known[tx_hash] = tx
        latency = self._submit_latency.sample()
        # The transaction reaches the node halfway through the round trip.
        self.clock.sleep(latency / 2)
        with self._lock:
            self._mempool.append(tx)
        self.clock.sleep(latency / 2)
        return tx_hash

    def call(self, address: str, payload: bytes) -> bytes:
        """Read-only call against committed state. Costs no ledger gas."""
        with self._lock:
            behavior = self._contracts.get(address)
            if behavior is None:
                raise ChainError(f"no contract registered at {address}")
        self.clock.sleep(self._read_latency.sample())
        with self._lock:
            try:
                effects = behavior.execute(payload, self._state[address])
            except Revert as exc:
                raise QueryError(str(exc)) from exc
            return effects.return_data

    def get_receipt(self, tx_hash: str) -> TransactionReceipt | None:
        """The receipt, or None while the transaction is still pending."""
        with self._lock:
            if tx_hash not in self._known:
                raise UnknownTransaction(tx_hash)
            return self._receipts.get(tx_hash)

    def get_logs(self, address: str | None = None, first_topic: str | None = None,
                 from_block: int = 0, to_block: int | None = None) -> list[LogEvent]:
        probe = Subscription(self, address, first_topic)
        last = self.head.number if to_block is None else to_block
        return [e for e in self._events if from_block <= e.block_number <= last and probe.matches(e)]

    def query_logs(self, address: str | None = None, first_topic: str | None = None,
                   from_block: int = 0, to_block: int | None = None) -> list[LogEvent]:
        """``get_logs`` as a node request: costs one read round trip."""
        self.clock.sleep(self._read_latency.sample())
        return self.get_logs(address, first_topic, from_block, to_block)

    # -- events ----------------------------------------------------------

    def subscribe_events(self, address: str | None = None, first_topic: str | None = None,
                         from_block: int | None = None) -> Subscription:
        """Subscribe to matching events published from now on.

        With ``from_block`` the history from that block onwards is replayed
        into the inbox first, stamped with the current time.
        """
        with self._lock:
            sub = Subscription(self, address, first_topic)
            if from_block is not None:
                now = self.clock.now()
                for event in self.get_logs(address, first_topic, from_block):
                    sub._deliver(event, now)
            self._subscribers.append(sub)
            return sub

    def _unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    # -- mining ----------------------------------------------------------

    def mine_next_block(self) -> Block:
        """Mine one block and return it.

        With auto-mining on this advances the clock until the running miner
        seals its next block; otherwise it mines one block synchronously.
        """
        if self.auto_mine:
            target = len(self._blocks)
            while len(self._blocks) <= target:
                if not self.clock.step():
                    raise ChainError("miner is not scheduled")
            return self._blocks[target]
        start = self.clock.now()
        with self._lock:
            self._building = (start, self._drain_mempool())
        self.clock.sleep(self._interblock.sample())
        return self._seal_block()

    def _drain_mempool(self) -> list[Transaction]:
        # Mempool order is arrival order, which keeps each sender's nonces FIFO.
        txs, self._mempool = self._mempool, []
        return txs

    def _begin_block(self) -> None:
        with self._lock:
            self._building = (self.clock.now(), self._drain_mempool())
        self.clock.call_later(self._interblock.sample(), self._seal_and_continue)

    def _seal_and_continue(self) -> None:
        self._seal_block()
        self._begin_block()

    def _seal_block(self) -> Block:
        with self._lock:
            assert self._building is not None
            timestamp, txs = self._building
            self._building = None
            parent = self.head
            number = parent.number + 1
            block_events: list[LogEvent] = []
            for tx in txs:
                receipt = self._execute(tx, number, timestamp, len(block_events))
                block_events.extend(receipt.logs)
                self._receipts[tx.hash] = receipt
            tx_hashes = tuple(tx.hash for tx in txs)
            header = json.dumps([number, repr(timestamp), parent.hash, tx_hashes]).encode()
            block = Block(number, timestamp, parent.hash, tx_hashes, digest(header))
            self._blocks.append(block)
            self._events.extend(block_events)
            if block_events:
                self._publish(block_events)
            logger.debug("sealed block %d with %d txs at t=%.3f", number, len(txs), self.clock.now())
            return block

    def _execute(self, tx: Transaction, number: int, timestamp: float, first_index: int) -> TransactionReceipt:
        behavior = self._contracts[tx.to]
        state = self._state[tx.to]
        try:
            effects = behavior.execute(tx.payload, state)
        except Revert as exc:
            logger.info("tx %s reverted: %s", tx.hash[:10], exc)
            return TransactionReceipt(tx.hash, number, timestamp, compute_gas(tx, None, self.schedule), "reverted")
        storage = self._storage[tx.to]
        for write in effects.storage_writes:
            if write.is_new_slot == (write.slot in storage):
                raise ChainError(f"{behavior.name} misdeclared slot {write.slot!r} (is_new_slot={write.is_new_slot})")
            storage.add(write.slot)
        self._state[tx.to] = {**state, **effects.state_update}
        logs = tuple(
            LogEvent(tx.to, tuple(topics), data, number, tx.hash, first_index + i)
            for i, (topics, data) in enumerate(effects.logs)
        )
        gas = compute_gas(tx, effects, self.schedule)
        return TransactionReceipt(tx.hash, number, timestamp, gas, "success", logs)

    def _publish(self, events: list[LogEvent]) -> None:
        # One propagation delay per block; deliveries never overtake earlier blocks.
        at = max(self.clock.now() + self._propagation.sample(), self._last_delivery_at)
        self._last_delivery_at = at
        subscribers = list(self._subscribers)
        self._pending_deliveries += 1

        def deliver():
            self._pending_deliveries -= 1
            for sub in subscribers:
                for event in events:
                    if sub.matches(event):
                        sub._deliver(event, at)

        self.clock.call_at(at, deliver)
