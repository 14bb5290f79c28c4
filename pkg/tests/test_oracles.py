import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracleforge.chain import LogEvent
from oracleforge.contracts import CREDIT_VERIFIED, PLACE_ORDER, REGISTER_GOODS
from oracleforge.offchain import ScanRecord, emit_scans
from oracleforge.oracles import (
    ROLES,
    BlockchainFacade,
    Controller,
    CorrelatedRequest,
    EventListener,
    OffchainTransmitter,
    PatternKind,
    PullInboundOracle,
    PushOutboundOracle,
    RequestError,
    UpdateListener,
)
from oracleforge.usecases import World

from conftest import inprocess_config

ALL_ROLES = frozenset().union(*ROLES.values())


def place_order(world, order_id, tax_id="AT-123"):
    payload = PLACE_ORDER.encode_call(order_id=order_id, buyer_name="Bulk Buyer", tax_id=tax_id)
    return world.buyer.submit(world.customer, payload, correlation_id=order_id).tx_hash


def request_event(world, order_id):
    receipt = world.wait_receipt(place_order(world, order_id))
    return receipt.logs[0]


# -- structure ----------------------------------------------------------------


def test_each_pattern_has_its_own_role_set():
    assert ROLES[PatternKind.PULL_INBOUND] == {"event_listener", "controller", "offchain_state_retriever",
                                               "blockchain_facade"}
    assert ROLES[PatternKind.PUSH_INBOUND] == {"update_listener", "controller", "blockchain_facade"}
    assert ROLES[PatternKind.PULL_OUTBOUND] == {"offchain_request_handler", "controller", "onchain_state_retriever"}
    assert ROLES[PatternKind.PUSH_OUTBOUND] == {"event_listener", "controller", "offchain_transmitter"}
    assert [k.inbound for k in PatternKind] == [True, True, False, False]


def test_wrong_participants_are_rejected(world):
    with pytest.raises(ValueError, match="needs exactly"):
        PullInboundOracle(EventListener(world.chain), Controller(), None,
                          BlockchainFacade(world.chain, "x", 1))
    with pytest.raises(ValueError):
        PushOutboundOracle(UpdateListener(), Controller(), OffchainTransmitter(print, world.clock))


def test_conformance_roles_touched(world):
    credit = world.credit_oracle()
    scan = world.scan_oracle()
    trace = world.trace_oracle()
    erp = world.erp_oracle()
    place_order(world, 1)
    scan.update_listener.push(ScanRecord(7, "steel bolts", 500))
    world.settle()
    trace.handle(CorrelatedRequest("t", {"order_id": 7}, world.clock.now()))
    for oracle in (credit, scan, trace, erp):
        touched = oracle.touched_roles()
        assert touched == ROLES[oracle.kind], oracle.kind
        assert not touched & (ALL_ROLES - ROLES[oracle.kind])


# -- pull-inbound ---------------------------------------------------------------


def test_credit_request_yields_one_response(world):
    oracle = world.credit_oracle()
    place_order(world, 42)
    world.settle()
    assert list(oracle.responses) == [42]
    response = world.chain.get_receipt(oracle.responses[42])
    assert response.status == "success" and response.gas_used == 22770
    tx_payload = world.chain._known[oracle.responses[42]].payload
    assert CREDIT_VERIFIED.decode_call(tx_payload) == {"order_id": 42, "creditworthy": True}
    assert world.credit.lookups == 1


def test_duplicate_request_is_answered_once(world):
    oracle = world.credit_oracle()
    event = request_event(world, 3)
    world.settle()
    first = oracle.responses[3]
    assert oracle.handle(event) == first
    assert len(oracle.facade.submissions) == 1


def test_request_response_bijection(world):
    oracle = world.credit_oracle()
    tax_ids = ["AT-123", "DE-404", "IT-777", "XX-000", "US-300"]
    for order_id in range(1, 127):
        place_order(world, order_id, tax_ids[order_id % len(tax_ids)])
    world.settle()
    cids = sorted(s.correlation_id for s in oracle.facade.submissions)
    assert cids == list(range(1, 127))
    decoded = sorted(CREDIT_VERIFIED.decode_call(world.chain._known[h].payload)["order_id"]
                     for h in oracle.responses.values())
    assert decoded == cids
    assert len({s.tx_hash for s in oracle.facade.submissions}) == 126


def test_unknown_buyer_is_not_creditworthy(world):
    oracle = world.credit_oracle()
    place_order(world, 8, "XX-000")
    world.settle()
    assert oracle.controller.verdicts[8] is False


def test_outage_dead_letters_without_a_transaction():
    config = inprocess_config(offchain={"outage_start": 0.0, "outage_duration": 1e6})
    with World(config) as world:
        oracle = world.credit_oracle()
        place_order(world, 5)
        world.settle()
        assert oracle.responses == {}
        assert oracle.facade.submissions == []
        [dead] = oracle.dead_letters
        assert dead.correlation_id == 5 and "4 attempts" in dead.reason
        assert world.credit.lookups == 4


def test_short_outage_is_ridden_out(world):
    oracle = world.credit_oracle()
    event = request_event(world, 11)
    world.credit.outage_start, world.credit.outage_duration = world.clock.now(), 1.0
    start = world.clock.now()
    oracle.handle(event, start)
    assert 11 in oracle.responses
    # Lookups at +0, +0.5 fail; +1.5 succeeds, then one submission round trip.
    submission = oracle.facade.submissions[0]
    assert submission.t1 == pytest.approx(start + 1.5)


def test_undecodable_request_is_skipped(world):
    oracle = world.credit_oracle()
    topic = oracle.listener.first_topic
    bogus = LogEvent(world.customer, (topic,), b"\x01junk", 1, "0x" + "00" * 32, 0)
    assert oracle.handle(bogus) is None
    assert len(oracle.skipped) == 1 and oracle.facade.submissions == []


# -- push-inbound ---------------------------------------------------------------


def test_scan_is_enriched_and_round_trips(world):
    oracle = world.scan_oracle()
    oracle.update_listener.push(ScanRecord(7, "steel bolts", 500))
    at = world.clock.now()
    world.pump()
    [(record, tx_hash)] = oracle.submitted
    assert record.location == "Linz" and record.scanned_at == pytest.approx(at, abs=1e-3)
    decoded = REGISTER_GOODS.decode_call(world.chain._known[tx_hash].payload)
    assert decoded == {"order_id": 7, "item_name": "steel bolts", "quantity": 500, "location": "Linz",
                       "scanned_at_ms": round(record.scanned_at * 1000)}
    assert world.wait_receipt(tx_hash).gas_used == 45235


@pytest.mark.parametrize("scan", [
    ScanRecord(7, "steel bolts", 0),
    ScanRecord(0, "steel bolts", 1),
    ScanRecord(7, "   ", 1),
    ScanRecord(7, "x" * 256, 1),
    ScanRecord(7, "bolts", 70_000),
])
def test_invalid_scans_are_rejected(world, scan):
    oracle = world.scan_oracle()
    oracle.update_listener.push(scan)
    world.pump()
    assert oracle.submitted == [] and len(oracle.rejections) == 1
    assert world.chain.pending_transactions() == 0


def test_every_valid_scan_gives_one_event(world):
    oracle = world.scan_oracle()
    for scan in emit_scans(300, 1):
        oracle.update_listener.push(scan)
    world.settle()
    assert len(oracle.submitted) == 300
    for _, tx_hash in oracle.submitted:
        assert len(world.chain.get_receipt(tx_hash).logs) == 1
    assert len(world.chain.events) == 300


# -- pull-outbound --------------------------------------------------------------


@pytest.mark.parametrize("source", ["call", "logs"])
def test_trace_returns_full_record(world, source):
    scan = world.scan_oracle()
    scan.update_listener.push(ScanRecord(7, "steel bolts", 500))
    scan.update_listener.push(ScanRecord(8, "rivets", 5))
    world.settle()
    trace = world.trace_oracle(source)
    response = trace.handle(CorrelatedRequest("r1", {"order_id": 7}, world.clock.now()))
    assert response["correlation_id"] == "r1"
    [record] = response["records"]
    assert record == scan.submitted[0][0].to_json()
    assert trace.handle(CorrelatedRequest("r2", {"order_id": 999}, 0.0))["records"] == []
    again = trace.handle(CorrelatedRequest("r1", {"order_id": 7}, 0.0))
    assert again == response


@pytest.mark.parametrize("payload", [{}, {"order_id": "7"}, {"order_id": 0}, {"order_id": True}, {"order_id": 2**40}])
def test_malformed_trace_request(world, payload):
    trace = world.trace_oracle()
    with pytest.raises(RequestError):
        trace.handle(CorrelatedRequest("bad", payload, 0.0))


# -- push-outbound --------------------------------------------------------------


def test_event_reaches_erp_once_across_restarts(world):
    scan, erp = world.scan_oracle(), world.erp_oracle()
    scan.update_listener.push(ScanRecord(7, "steel bolts", 500))
    world.settle()
    assert len(world.erp) == 1
    erp.restart_listener(from_block=0)
    world.settle()
    erp.restart_listener()
    world.settle()
    assert len(world.erp) == 1 and erp.duplicates == 2
    message = world.erp.dump()[0]
    assert message.record == scan.submitted[0][0]


def test_restart_while_down_loses_nothing(world):
    scan, erp = world.scan_oracle(), world.erp_oracle()
    scan.update_listener.push(ScanRecord(1, "rivets", 1))
    world.settle()
    erp.listener.stop()
    scan.update_listener.push(ScanRecord(2, "rivets", 1))
    world.settle()
    assert len(world.erp) == 1
    erp.restart_listener()
    world.settle()
    assert len(world.erp) == 2


def test_unreachable_sink_dead_letters(world):
    scan, erp = world.scan_oracle(), world.erp_oracle()

    def down(*_):
        raise ConnectionError("erp down")

    erp.transmitter.send = down
    scan.update_listener.push(ScanRecord(1, "rivets", 1))
    world.settle()
    assert erp.delivered == {} and len(erp.dead_letters) == 1


def test_undecodable_event_is_skipped(world):
    erp = world.erp_oracle()
    bogus = LogEvent(world.arrival, (erp.listener.first_topic,), b"??", 1, "0x" + "11" * 32, 0)
    assert erp.handle(bogus) is None
    assert len(erp.skipped) == 1 and len(world.erp) == 0


def test_deliveries_follow_their_blocks(world):
    scan, erp = world.scan_oracle(), world.erp_oracle()
    for s in emit_scans(438, 2):
        scan.update_listener.push(s)
    world.settle()
    assert len(erp.delivered) == len(world.erp) == 438
    for (tx_hash, _), record in erp.delivered.items():
        assert record.t4 >= world.chain.get_receipt(tx_hash).block_timestamp


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=8), st.integers(0, 1000))
def test_exactly_once_under_random_restarts(restart_points, seed):
    config = inprocess_config(chain={"seed": seed})
    with World(config) as world:
        scan, erp = world.scan_oracle(), world.erp_oracle()
        scans = list(emit_scans(12, seed))
        for i, s in enumerate(scans):
            scan.update_listener.push(s)
            world.pump()
            if i in restart_points:
                erp.restart_listener(from_block=min(restart_points))
        world.settle()
        assert len(world.erp) == len(erp.delivered) == 12
        assert {m.source for m in world.erp.dump()} == {(e.tx_hash, e.log_index) for e in world.chain.events}
