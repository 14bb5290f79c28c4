"""The four oracle patterns, each wired from its own participants.

A pattern instance is a reactive loop: ``step()`` drains whatever its input
participant has received and processes items one at a time, in order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Any

from ..chain import LogEvent
from ..codec import CodecError
from .participants import (
    BlockchainFacade,
    Controller,
    EventListener,
    OffchainRequestHandler,
    OffchainStateRetriever,
    OffchainTransmitter,
    OnchainStateRetriever,
    Participant,
    UpdateListener,
)
from .retry import RetryExhausted

logger = logging.getLogger(__name__)


class PatternKind(str, Enum):
    PULL_INBOUND = "pull-inbound"
    PUSH_INBOUND = "push-inbound"
    PULL_OUTBOUND = "pull-outbound"
    PUSH_OUTBOUND = "push-outbound"

    @property
    def inbound(self) -> bool:
        return self in (PatternKind.PULL_INBOUND, PatternKind.PUSH_INBOUND)


ROLES: dict[PatternKind, frozenset[str]] = {
    PatternKind.PULL_INBOUND: frozenset(
        {"event_listener", "controller", "offchain_state_retriever", "blockchain_facade"}),
    PatternKind.PUSH_INBOUND: frozenset({"update_listener", "controller", "blockchain_facade"}),
    PatternKind.PULL_OUTBOUND: frozenset({"offchain_request_handler", "controller", "onchain_state_retriever"}),
    PatternKind.PUSH_OUTBOUND: frozenset({"event_listener", "controller", "offchain_transmitter"}),
}


class ValidationError(ValueError):
    pass


class RequestError(ValueError):
    """Malformed pull-outbound request."""


@dataclass
class ParticipantSet:
    event_listener: EventListener | None = None
    update_listener: UpdateListener | None = None
    controller: Controller | None = None
    blockchain_facade: BlockchainFacade | None = None
    offchain_state_retriever: OffchainStateRetriever | None = None
    onchain_state_retriever: OnchainStateRetriever | None = None
    offchain_request_handler: OffchainRequestHandler | None = None
    offchain_transmitter: OffchainTransmitter | None = None

    def present(self) -> frozenset[str]:
        return frozenset(f.name for f in fields(self) if getattr(self, f.name) is not None)

    def members(self) -> list[Participant]:
        return [getattr(self, name) for name in sorted(self.present())]


@dataclass(frozen=True)
class CorrelatedRequest:
    correlation_id: Any
    payload: dict
    received_at: float


@dataclass(frozen=True)
class DeadLetter:
    correlation_id: Any
    reason: str
    at: float


@dataclass(frozen=True)
class DeliveryRecord:
    source: tuple[str, int]
    record: Any
    stored: bool
    t4: float


class OracleInstance:
    kind: PatternKind

    def __init__(self, participants: ParticipantSet):
        present = participants.present()
        required = ROLES[self.kind]
        if present != required:
            raise ValueError(f"{self.kind.value} oracle needs exactly {sorted(required)}, got {sorted(present)}")
        for name in present:
            role = getattr(getattr(participants, name), "role", None)
            if role != name:
                raise ValueError(f"{self.kind.value} oracle: {name} slot holds a {role or 'non-participant'}")
        self.participants = participants
        # One log shared by all participants, in call order.
        self.interactions: list[tuple[str, str]] = []
        for member in participants.members():
            member.interactions = self.interactions
        self.skipped: list[tuple[Any, str]] = []
        self.dead_letters: list[DeadLetter] = []

    def touched_roles(self) -> set[str]:
        return {role for role, _ in self.interactions}

    def pending(self) -> int:
        return 0

    def step(self) -> int:
        return 0


class PullInboundOracle(OracleInstance):
    """On-chain request event -> off-chain state -> response transaction.

    Controller hooks: ``decode_request(event, received_at)``,
    ``build_response(request, state) -> (to, payload)``.
    """

    kind = PatternKind.PULL_INBOUND

    def __init__(self, listener: EventListener, controller: Controller,
                 retriever: OffchainStateRetriever, facade: BlockchainFacade):
        super().__init__(ParticipantSet(event_listener=listener, controller=controller,
                                        offchain_state_retriever=retriever, blockchain_facade=facade))
        self.listener = listener
        self.controller = controller
        self.retriever = retriever
        self.facade = facade
        self.responses: dict[Any, str] = {}
        self.requests: dict[Any, str] = {}

    def start(self) -> None:
        self.listener.start()

    def pending(self) -> int:
        return self.listener.pending()

    def step(self) -> int:
        deliveries = self.listener.poll()
        for delivery in deliveries:
            self.handle(delivery.event, delivery.received_at)
        return len(deliveries)

    def handle(self, event: LogEvent, received_at: float | None = None) -> str | None:
        """Answer one request event. Returns the response tx hash, or None
        when the request was skipped or dead-lettered."""
        now = self.facade.chain.clock.now() if received_at is None else received_at
        try:
            request = self.controller.decode_request(event, now)
        except CodecError as exc:
            logger.warning("skipping undecodable request event %s/%d: %s", event.tx_hash, event.log_index, exc)
            self.skipped.append(((event.tx_hash, event.log_index), str(exc)))
            return None
        cid = request.correlation_id
        if cid in self.responses:
            logger.debug("duplicate request %r; already answered", cid)
            return self.responses[cid]
        try:
            state = self.retriever.retrieve(request)
        except RetryExhausted as exc:
            self.dead_letters.append(DeadLetter(cid, str(exc), self.facade.chain.clock.now()))
            return None
        to, payload = self.controller.build_response(request, state)
        submission = self.facade.submit(to, payload, correlation_id=cid)
        self.responses[cid] = submission.tx_hash
        self.requests[cid] = event.tx_hash
        return submission.tx_hash


class PushInboundOracle(OracleInstance):
    """Off-chain update -> validated, enriched transaction.

    Controller hooks: ``validate(update)`` raising ValidationError,
    ``enrich(update, now)``, ``encode(record) -> (to, payload)``,
    ``correlation_id(record)``.
    """

    kind = PatternKind.PUSH_INBOUND

    def __init__(self, update_listener: UpdateListener, controller: Controller, facade: BlockchainFacade):
        super().__init__(ParticipantSet(update_listener=update_listener, controller=controller,
                                        blockchain_facade=facade))
        self.update_listener = update_listener
        self.controller = controller
        self.facade = facade
        self.rejections: list[tuple[Any, str]] = []
        self.submitted: list[tuple[Any, str]] = []

    def pending(self) -> int:
        return self.update_listener.pending()

    def step(self) -> int:
        updates = self.update_listener.poll()
        for update in updates:
            self.handle(update)
        return len(updates)

    def handle(self, update: Any) -> str | None:
        try:
            self.controller.validate(update)
        except ValidationError as exc:
            logger.info("rejected update %r: %s", update, exc)
            self.rejections.append((update, str(exc)))
            return None
        record = self.controller.enrich(update, self.facade.chain.clock.now())
        to, payload = self.controller.encode(record)
        submission = self.facade.submit(to, payload, correlation_id=self.controller.correlation_id(record))
        self.submitted.append((record, submission.tx_hash))
        return submission.tx_hash


class PullOutboundOracle(OracleInstance):
    """Off-chain request -> chain query -> full matching record set.

    Controller hooks: ``to_query(request)`` raising RequestError,
    ``fetch(retriever, query)``, ``postprocess(request, raw)``.
    """

    kind = PatternKind.PULL_OUTBOUND

    def __init__(self, request_handler: OffchainRequestHandler, controller: Controller,
                 retriever: OnchainStateRetriever):
        super().__init__(ParticipantSet(offchain_request_handler=request_handler, controller=controller,
                                        onchain_state_retriever=retriever))
        self.request_handler = request_handler
        self.controller = controller
        self.retriever = retriever

    def handle(self, request: CorrelatedRequest) -> Any:
        self.request_handler.accept(request)
        query = self.controller.to_query(request)
        raw = self.controller.fetch(self.retriever, query)
        return self.request_handler.respond(self.controller.postprocess(request, raw))


class PushOutboundOracle(OracleInstance):
    """On-chain event -> decoded record -> off-chain delivery, exactly once
    per (tx_hash, log_index) across listener restarts.

    Controller hooks: ``decode_event(event)``.
    """

    kind = PatternKind.PUSH_OUTBOUND

    def __init__(self, listener: EventListener, controller: Controller, transmitter: OffchainTransmitter):
        super().__init__(ParticipantSet(event_listener=listener, controller=controller,
                                        offchain_transmitter=transmitter))
        self.listener = listener
        self.controller = controller
        self.transmitter = transmitter
        self.delivered: dict[tuple[str, int], DeliveryRecord] = {}
        self.duplicates = 0

    def start(self) -> None:
        self.listener.start()

    def restart_listener(self, from_block: int | None = None) -> None:
        self.listener.restart(from_block)

    def pending(self) -> int:
        return self.listener.pending()

    def step(self) -> int:
        deliveries = self.listener.poll()
        for delivery in deliveries:
            self.handle(delivery.event, delivery.received_at)
        return len(deliveries)

    def handle(self, event: LogEvent, received_at: float | None = None) -> DeliveryRecord | None:
        source = (event.tx_hash, event.log_index)
        if source in self.delivered:
            self.duplicates += 1
            return None
        t4 = self.transmitter.clock.now() if received_at is None else received_at
        try:
            record = self.controller.decode_event(event)
        except CodecError as exc:
            logger.warning("skipping undecodable event %s/%d: %s", *source, exc)
            self.skipped.append((source, str(exc)))
            return None
        try:
            stored = self.transmitter.transmit(source, record)
        except RetryExhausted as exc:
            self.dead_letters.append(DeadLetter(source, str(exc), self.transmitter.clock.now()))
            return None
        result = DeliveryRecord(source, record, bool(stored), t4)
        self.delivered[source] = result
        return result
