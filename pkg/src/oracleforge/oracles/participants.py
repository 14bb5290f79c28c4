"""Pattern participants.

Each participant notes what it does in a shared interaction log, which is
how tests check that an oracle only touches the roles of its pattern.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable

from ..chain import EventDelivery, LogEvent, SimulatedChain, Subscription, Transaction
from ..clock import VirtualClock
from .retry import RetryPolicy

logger = logging.getLogger(__name__)


class Participant:
    role = "participant"

    def __init__(self):
        self.interactions: list[tuple[str, str]] = []

    def _note(self, action: str) -> None:
        self.interactions.append((self.role, action))


class EventListener(Participant):
    """Subscription to on-chain events matching (address, first topic)."""

    role = "event_listener"

    def __init__(self, chain: SimulatedChain, address: str | None = None, first_topic: str | None = None):
        super().__init__()
        self.chain = chain
        self.address = address
        self.first_topic = first_topic
        self.last_block = -1
        self.restarts = 0
        self._sub: Subscription | None = None

    @property
    def running(self) -> bool:
        return self._sub is not None

    def start(self, from_block: int | None = None) -> None:
        if self._sub is not None:
            raise RuntimeError("listener already running")
        self._note("subscribe")
        self._sub = self.chain.subscribe_events(self.address, self.first_topic, from_block)

    def stop(self) -> None:
        if self._sub is not None:
            self._sub.cancel()
            self._sub = None

    def restart(self, from_block: int | None = None) -> None:
        """Drop the subscription and resubscribe, replaying from ``from_block``.

        Defaults to the last block seen, so nothing published while the
        listener was down is lost; the oracle dedups the overlap.
        """
        self.stop()
        self.restarts += 1
        self.start(self.last_block if from_block is None else from_block)

    def poll(self) -> list[EventDelivery]:
        if self._sub is None:
            return []
        items = self._sub.poll()
        if items:
            self._note("receive")
            self.last_block = max(self.last_block, items[-1].event.block_number)
        return items

    def pending(self) -> int:
        return len(self._sub) if self._sub is not None else 0


class UpdateListener(Participant):
    """Inbox for off-chain updates pushed by a data holder."""

    role = "update_listener"

    def __init__(self):
        super().__init__()
        self._inbox: list[Any] = []

    def push(self, update: Any) -> None:
        self._inbox.append(update)

    def poll(self) -> list[Any]:
        items, self._inbox = self._inbox, []
        if items:
            self._note("receive")
        return items

    def pending(self) -> int:
        return len(self._inbox)


class Controller(Participant):
    """Transforms, filters and enriches data between the other participants.

    The four pattern classes call the hooks relevant to them; use cases
    subclass and implement those.
    """

    role = "controller"


@dataclass(frozen=True)
class Submission:
    tx_hash: str
    to: str
    correlation_id: Any
    t1: float
    t2: float


class BlockchainFacade(Participant):
    """Submits transactions from one account and stamps t1/t2 around each."""

    role = "blockchain_facade"

    def __init__(self, chain: SimulatedChain, account: str, gas_price: int):
        super().__init__()
        self.chain = chain
        self.account = account
        self.gas_price = gas_price
        self.submissions: list[Submission] = []

    def submit(self, to: str, payload: bytes, correlation_id: Any = None) -> Submission:
        self._note("submit")
        tx = Transaction(self.account, to, payload, self.gas_price, self.chain.next_nonce(self.account))
        t1 = self.chain.clock.now()
        tx_hash = self.chain.submit_transaction(tx)
        t2 = self.chain.clock.now()
        record = Submission(tx_hash, to, correlation_id, t1, t2)
        self.submissions.append(record)
        return record


class OffchainStateRetriever(Participant):
    role = "offchain_state_retriever"

    def __init__(self, fetch: Callable[[Any], Any], clock: VirtualClock, retry: RetryPolicy | None = None):
        super().__init__()
        self.fetch = fetch
        self.clock = clock
        self.retry = retry or RetryPolicy()

    def retrieve(self, request: Any) -> Any:
        """Raises ``RetryExhausted`` once every attempt has failed."""
        self._note("fetch")
        return self.retry.call(lambda: self.fetch(request), self.clock)


class OnchainStateRetriever(Participant):
    role = "onchain_state_retriever"

    def __init__(self, chain: SimulatedChain):
        super().__init__()
        self.chain = chain

    def call(self, address: str, payload: bytes) -> bytes:
        self._note("call")
        return self.chain.call(address, payload)

    def scan_logs(self, address: str | None, first_topic: str | None, from_block: int = 0) -> list[LogEvent]:
        """Historical log scan; costs one read round trip."""
        self._note("scan_logs")
        return self.chain.query_logs(address, first_topic, from_block)


class OffchainRequestHandler(Participant):
    """Entry point for off-chain requesters; validates and answers."""

    role = "offchain_request_handler"

    def __init__(self, validate: Callable[[Any], None] | None = None):
        super().__init__()
        self.validate = validate
        self.served = 0

    def accept(self, request: Any) -> None:
        self._note("accept")
        if self.validate is not None:
            self.validate(request)

    def respond(self, response: Any) -> Any:
        self._note("respond")
        self.served += 1
        return response


class OffchainTransmitter(Participant):
    role = "offchain_transmitter"

    def __init__(self, send: Callable[..., Any], clock: VirtualClock, retry: RetryPolicy | None = None):
        super().__init__()
        self.send = send
        self.clock = clock
        self.retry = retry or RetryPolicy()

    def transmit(self, *args: Any) -> Any:
        self._note("transmit")
        return self.retry.call(lambda: self.send(*args), self.clock)
