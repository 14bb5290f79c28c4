"""The two supply-chain scenarios, driven end to end.

Credit check (one pull-inbound oracle)::

    1 buyer places order -> 2 order tx -> 3 request event -> 4 credit API
    -> 5 controller decides -> 6 response tx -> 7 manufacturer reads order

QR trace (push-inbound, push-outbound, pull-outbound)::

    1 scan -> 2 QR data -> 3 update listener -> 4 register tx
    -> 5a event -> 6a ERP delivery
    -> 5b trace request -> 6b request handler -> 7b chain query
    -> 8b records found -> 9b response
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Sequence

from ..chain import TransactionReceipt
from ..contracts import GET_ORDER, GOODS_REGISTERED, PLACE_ORDER, decode_order_view
from ..offchain import ScanRecord, emit_scans
from ..oracles import CorrelatedRequest
from .world import DEFAULT_TIMEOUT, World

logger = logging.getLogger(__name__)

CREDIT_STEPS = ("1-place-order", "2-order-tx", "3-request-event", "4-credit-lookup", "5-process-response",
                "6-response-tx", "7-manufacturer-access")
QR_STEPS = ("1-scan", "2-qr-data", "3-update-listener", "4-register-tx", "5a-event", "6a-erp-delivery",
            "5b-trace-request", "6b-request-handler", "7b-chain-query", "8b-records-found", "9b-response")


@dataclass
class ScenarioResult:
    """``status`` is ``ok``, ``withheld``, ``verification-failed`` or ``failed``."""

    scenario: str
    status: str = "running"
    steps_completed: list[str] = field(default_factory=list)
    artifacts: dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0
    failed_step: str | None = None

    def complete(self, step: str, artifact: Any) -> None:
        self.steps_completed.append(step)
        self.artifacts[step] = artifact

    def fail(self, step: str, status: str, artifact: Any) -> ScenarioResult:
        self.status = status
        self.failed_step = step
        self.artifacts[step] = artifact
        return self

    @property
    def succeeded(self) -> bool:
        return self.status in ("ok", "withheld")

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "status": self.status,
            "steps_completed": list(self.steps_completed),
            "failed_step": self.failed_step,
            "artifacts": self.artifacts,
            "wall_time": self.wall_time,
        }


def receipt_artifact(receipt: TransactionReceipt) -> dict:
    return {"tx_hash": receipt.tx_hash, "block_number": receipt.block_number,
            "block_timestamp": receipt.block_timestamp, "gas_used": receipt.gas_used, "status": receipt.status}


def run_credit_check(world: World, order_id: int = 1, buyer_name: str = "Bulk Buyer",
                     tax_id: str = "AT-123", timeout: float = DEFAULT_TIMEOUT) -> ScenarioResult:
    start = world.clock.now()
    result = ScenarioResult("credit-check")
    try:
        _credit_check(world, result, order_id, buyer_name, tax_id, timeout)
    finally:
        result.wall_time = world.clock.now() - start
    return result


def _credit_check(world, result, order_id, buyer_name, tax_id, timeout):
    oracle = world.credit_oracle()
    order = {"order_id": order_id, "buyer_name": buyer_name, "tax_id": tax_id}
    result.complete("1-place-order", order)

    submission = world.buyer.submit(world.customer, PLACE_ORDER.encode_call(**order), correlation_id=order_id)
    receipt = world.wait_receipt(submission.tx_hash, timeout)
    if receipt.status != "success":
        return result.fail("2-order-tx", "failed", receipt_artifact(receipt))
    result.complete("2-order-tx", receipt_artifact(receipt))

    def handled():
        return (order_id in oracle.responses or any(d.correlation_id == order_id for d in oracle.dead_letters)
                or bool(oracle.skipped))

    world.run_until(handled, timeout)
    event = receipt.logs[0]
    result.complete("3-request-event", {"tx_hash": event.tx_hash, "log_index": event.log_index,
                                        "block_number": event.block_number})

    dead = [d for d in oracle.dead_letters if d.correlation_id == order_id]
    if dead or order_id not in oracle.responses:
        reason = dead[0].reason if dead else "request event could not be decoded"
        return result.fail("4-credit-lookup", "verification-failed",
                           {"error": reason, "response_txs": len(oracle.facade.submissions)})
    profile = oracle.controller.profiles[order_id]
    result.complete("4-credit-lookup", profile.to_json() if profile else None)
    result.complete("5-process-response", {"creditworthy": oracle.controller.verdicts[order_id]})

    response = world.wait_receipt(oracle.responses[order_id], timeout)
    if response.status != "success":
        return result.fail("6-response-tx", "failed", receipt_artifact(response))
    result.complete("6-response-tx", receipt_artifact(response))

    view = decode_order_view(world.chain.call(world.customer, GET_ORDER.encode_call(order_id=order_id)))
    result.complete("7-manufacturer-access", view)
    result.status = "ok" if view["visible"] else "withheld"
    return result


def run_qr_trace(world: World, scans: int | Sequence[ScanRecord] = 10, seed: int = 0,
                 restart_listener: bool = False, timeout: float = DEFAULT_TIMEOUT) -> ScenarioResult:
    """With ``restart_listener`` the push-outbound listener is restarted from
    block 0 once half of the events are delivered, replaying everything."""
    start = world.clock.now()
    result = ScenarioResult("qr-trace")
    try:
        _qr_trace(world, result, scans, seed, restart_listener, timeout)
    finally:
        result.wall_time = world.clock.now() - start
    return result


def _qr_trace(world, result, scans, seed, restart_listener, timeout):
    raw = list(emit_scans(scans, seed)) if isinstance(scans, int) else list(scans)
    push, erp, trace = world.scan_oracle(), world.erp_oracle(), world.trace_oracle()
    result.complete("1-scan", len(raw))
    result.complete("2-qr-data", [scan.to_json() for scan in raw])
    for scan in raw:
        push.update_listener.push(scan)
    result.complete("3-update-listener", len(raw))

    if restart_listener:
        world.run_until(lambda: len(erp.delivered) >= len(raw) // 2, timeout)
        result.artifacts["listener-restart"] = {"delivered_before": len(erp.delivered), "from_block": 0}
        erp.restart_listener(from_block=0)
    world.settle(timeout)

    accepted = len(raw) - len(push.rejections)
    receipts = [world.chain.get_receipt(tx_hash) for _, tx_hash in push.submitted]
    bad = [r.tx_hash for r in receipts if r is None or r.status != "success"]
    if len(receipts) != accepted or bad:
        return result.fail("4-register-tx", "failed", {"expected": accepted, "submitted": len(receipts),
                                                       "unsuccessful": bad})
    result.complete("4-register-tx", {"transactions": [receipt_artifact(r) for r in receipts],
                                      "rejected": [reason for _, reason in push.rejections]})

    events = world.chain.get_logs(world.arrival, GOODS_REGISTERED.topic)
    if len(events) != accepted:
        return result.fail("5a-event", "failed", {"expected": accepted, "events": len(events)})
    result.complete("5a-event", [[e.tx_hash, e.log_index] for e in events])

    messages = world.erp_client.dump()
    if len(messages) != accepted or erp.dead_letters:
        return result.fail("6a-erp-delivery", "failed", {"expected": accepted, "messages": len(messages),
                                                         "dead_letters": len(erp.dead_letters)})
    result.complete("6a-erp-delivery", {"messages": messages, "duplicates_suppressed": erp.duplicates})

    requests = [CorrelatedRequest(i, {"order_id": record.order_id}, world.clock.now())
                for i, (record, _) in enumerate(push.submitted)]
    result.complete("5b-trace-request", [r.payload for r in requests])
    responses = [trace.handle(request) for request in requests]
    result.complete("6b-request-handler", trace.request_handler.served)
    result.complete("7b-chain-query", len(responses))
    missing = [record.order_id for (record, _), response in zip(push.submitted, responses)
               if record.to_json() not in response["records"]]
    if missing:
        return result.fail("8b-records-found", "failed", {"missing": missing})
    result.complete("8b-records-found", len(responses))
    result.complete("9b-response", responses)
    result.status = "ok"
    return result
