"""Controllers that bind the generic patterns to the demo contracts."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any

from ..chain import LogEvent
from ..codec import CodecError
from ..contracts import (
    CREDIT_CHECK_REQUESTED,
    CREDIT_VERIFIED,
    GET_RECORDS,
    GOODS_REGISTERED,
    ORDER_ID,
    QUANTITY,
    REGISTER_GOODS,
    decode_records,
)
from ..offchain import CreditProfile, ScanRecord
from ..oracles import Controller, CorrelatedRequest, OnchainStateRetriever, RequestError, ValidationError


def record_to_fields(record: ScanRecord) -> dict[str, Any]:
    return {
        "order_id": record.order_id,
        "item_name": record.item_name,
        "quantity": record.quantity,
        "location": record.location,
        "scanned_at_ms": round(record.scanned_at * 1000),
    }


def record_from_fields(values: dict[str, Any]) -> ScanRecord:
    return ScanRecord(values["order_id"], values["item_name"], values["quantity"], values["location"],
                      values["scanned_at_ms"] / 1000)


class CreditCheckController(Controller):
    """Pull-inbound: CreditCheckRequested -> credit lookup -> creditVerified."""

    def __init__(self, customer_address: str):
        super().__init__()
        self.customer_address = customer_address
        self.verdicts: dict[int, bool] = {}
        self.profiles: dict[int, CreditProfile | None] = {}

    def decode_request(self, event: LogEvent, received_at: float) -> CorrelatedRequest:
        self._note("decode")
        args = CREDIT_CHECK_REQUESTED.decode(event.topics, event.data)
        return CorrelatedRequest(args["order_id"], args, received_at)

    def build_response(self, request: CorrelatedRequest, profile: CreditProfile | None) -> tuple[str, bytes]:
        self._note("transform")
        # No profile on record counts as not creditworthy.
        verdict = bool(profile is not None and profile.creditworthy)
        self.profiles[request.correlation_id] = profile
        self.verdicts[request.correlation_id] = verdict
        return self.customer_address, CREDIT_VERIFIED.encode_call(order_id=request.correlation_id,
                                                                   creditworthy=verdict)


class ScanController(Controller):
    """Push-inbound: validate a raw scan, stamp location and time, encode."""

    def __init__(self, arrival_address: str, location: str):
        super().__init__()
        self.arrival_address = arrival_address
        self.location = location

    def validate(self, scan: ScanRecord) -> None:
        self._note("validate")
        if not isinstance(scan.order_id, int) or not 1 <= scan.order_id <= ORDER_ID.max_value:
            raise ValidationError(f"order_id {scan.order_id!r} out of range")
        if not isinstance(scan.item_name, str) or not scan.item_name.strip():
            raise ValidationError("item name is empty")
        if len(scan.item_name.encode("utf-8")) > 255:
            raise ValidationError("item name longer than 255 bytes")
        if not isinstance(scan.quantity, int) or not 1 <= scan.quantity <= QUANTITY.max_value:
            raise ValidationError(f"quantity {scan.quantity!r} out of range")

    def enrich(self, scan: ScanRecord, now: float) -> ScanRecord:
        self._note("enrich")
        # Millisecond resolution, matching the on-chain timestamp field.
        return dataclasses.replace(scan, location=self.location, scanned_at=math.floor(now * 1000) / 1000)

    def encode(self, record: ScanRecord) -> tuple[str, bytes]:
        self._note("encode")
        return self.arrival_address, REGISTER_GOODS.encode_call(**record_to_fields(record))

    def correlation_id(self, record: ScanRecord) -> int:
        return record.order_id


@dataclass(frozen=True)
class Query:
    address: str
    payload: bytes
    order_id: int


class TraceController(Controller):
    """Pull-outbound: trace(order_id) -> every stored record for the order.

    ``source="call"`` reads contract state; ``source="logs"`` scans the
    GoodsRegistered history instead. Both return the same records.
    """

    def __init__(self, arrival_address: str, source: str = "call"):
        super().__init__()
        if source not in ("call", "logs"):
            raise ValueError("source must be 'call' or 'logs'")
        self.arrival_address = arrival_address
        self.source = source

    def to_query(self, request: CorrelatedRequest) -> Query:
        self._note("to_query")
        order_id = request.payload.get("order_id") if isinstance(request.payload, dict) else None
        if isinstance(order_id, bool) or not isinstance(order_id, int) or not 1 <= order_id <= ORDER_ID.max_value:
            raise RequestError(f"order_id must be an integer in 1..{ORDER_ID.max_value}, got {order_id!r}")
        return Query(self.arrival_address, GET_RECORDS.encode_call(order_id=order_id), order_id)

    def fetch(self, retriever: OnchainStateRetriever, query: Query) -> list[dict[str, Any]]:
        if self.source == "call":
            return decode_records(retriever.call(query.address, query.payload))
        events = retriever.scan_logs(query.address, GOODS_REGISTERED.topic)
        found = []
        for event in events:
            values = GOODS_REGISTERED.decode(event.topics, event.data)
            if values["order_id"] == query.order_id:
                found.append(values)
        return found

    def postprocess(self, request: CorrelatedRequest, raw: list[dict[str, Any]]) -> dict[str, Any]:
        self._note("postprocess")
        return {
            "correlation_id": request.correlation_id,
            "order_id": request.payload["order_id"],
            "records": [record_from_fields(values).to_json() for values in raw],
        }


class ErpForwardController(Controller):
    """Push-outbound: GoodsRegistered -> ScanRecord for the ERP."""

    def decode_event(self, event: LogEvent) -> ScanRecord:
        self._note("decode")
        try:
            return record_from_fields(GOODS_REGISTERED.decode(event.topics, event.data))
        except KeyError as exc:
            raise CodecError(f"missing field {exc}") from None
