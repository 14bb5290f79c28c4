"""Oracle patterns and their participants."""

from .participants import (
    BlockchainFacade,
    Controller,
    EventListener,
    OffchainRequestHandler,
    OffchainStateRetriever,
    OffchainTransmitter,
    OnchainStateRetriever,
    Participant,
    Submission,
    UpdateListener,
)
from .patterns import (
    ROLES,
    CorrelatedRequest,
    DeadLetter,
    DeliveryRecord,
    OracleInstance,
    ParticipantSet,
    PatternKind,
    PullInboundOracle,
    PullOutboundOracle,
    PushInboundOracle,
    PushOutboundOracle,
    RequestError,
    ValidationError,
)
from .retry import RetryExhausted, RetryPolicy

__all__ = [
    "ROLES", "BlockchainFacade", "Controller", "CorrelatedRequest", "DeadLetter", "DeliveryRecord",
    "EventListener", "OffchainRequestHandler", "OffchainStateRetriever", "OffchainTransmitter",
    "OnchainStateRetriever", "OracleInstance", "Participant", "ParticipantSet", "PatternKind",
    "PullInboundOracle", "PullOutboundOracle", "PushInboundOracle", "PushOutboundOracle", "RequestError",
    "RetryExhausted", "RetryPolicy", "Submission", "UpdateListener", "ValidationError",
]
