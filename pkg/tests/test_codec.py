import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracleforge.codec import CodecError, Event, Flag, Function, Text, Uint, selector
from oracleforge.contracts import (
    CREDIT_CHECK_REQUESTED,
    CREDIT_VERIFIED,
    GET_ORDER,
    GET_RECORDS,
    GOODS_REGISTERED,
    ORDER_ID,
    PLACE_ORDER,
    QUANTITY,
    REGISTER_GOODS,
    TIMESTAMP_MS,
)

texts = st.text(max_size=60).filter(lambda s: len(s.encode()) <= 255)
records = st.fixed_dictionaries({
    "order_id": st.integers(0, ORDER_ID.max_value),
    "item_name": texts,
    "quantity": st.integers(0, QUANTITY.max_value),
    "location": texts,
    "scanned_at_ms": st.integers(0, TIMESTAMP_MS.max_value),
})


@given(records)
def test_register_goods_round_trip(record):
    assert REGISTER_GOODS.decode_call(REGISTER_GOODS.encode_call(**record)) == record


@given(records)
def test_goods_registered_round_trip(record):
    topics, data = GOODS_REGISTERED.encode(**record)
    assert GOODS_REGISTERED.decode(topics, data) == record


@given(st.integers(0, ORDER_ID.max_value), texts, texts)
def test_credit_request_round_trip(order_id, name, tax_id):
    values = {"order_id": order_id, "buyer_name": name, "tax_id": tax_id}
    assert PLACE_ORDER.decode_call(PLACE_ORDER.encode_call(**values)) == values
    assert CREDIT_CHECK_REQUESTED.decode(*CREDIT_CHECK_REQUESTED.encode(**values)) == values


@given(st.integers(0, ORDER_ID.max_value), st.booleans())
def test_credit_response_is_value_independent(order_id, flag):
    payload = CREDIT_VERIFIED.encode_call(order_id=order_id, creditworthy=flag)
    assert CREDIT_VERIFIED.decode_call(payload) == {"order_id": order_id, "creditworthy": flag}
    assert len(payload) == 13
    assert 0 not in payload


def test_selectors_have_no_zero_bytes():
    for fn in (PLACE_ORDER, CREDIT_VERIFIED, GET_ORDER, REGISTER_GOODS, GET_RECORDS):
        assert len(fn.selector) == 4 and 0 not in fn.selector
    assert len(bytes.fromhex(GOODS_REGISTERED.topic[2:])) == 32


def test_selector_is_digest_prefix():
    assert selector("f(uint32)") == bytes.fromhex(Event("f(uint32)", ()).topic[2:10])


def test_uint_bounds():
    with pytest.raises(CodecError):
        Uint(2).encode(256)
    with pytest.raises(CodecError):
        Uint(2).encode(-1)
    with pytest.raises(CodecError):
        Uint(2).encode(True)
    with pytest.raises(CodecError):
        Uint(2).decode(b"zz", 0)


def test_text_and_flag_errors():
    with pytest.raises(CodecError):
        Text.encode("x" * 256)
    with pytest.raises(CodecError):
        Text.decode(b"\x05ab", 0)
    with pytest.raises(CodecError):
        Flag.decode(b"2", 0)


def test_wrong_selector_and_trailing_bytes():
    payload = GET_ORDER.encode_call(order_id=3)
    with pytest.raises(CodecError):
        GET_RECORDS.decode_call(payload)
    with pytest.raises(CodecError):
        GET_ORDER.decode_call(payload + b"1")
    fn = Function("g()", ())
    assert fn.decode_call(fn.encode_call()) == {}


def test_event_topic_mismatch():
    topics, data = GOODS_REGISTERED.encode(order_id=1, item_name="a", quantity=1, location="b", scanned_at_ms=0)
    with pytest.raises(CodecError):
        CREDIT_CHECK_REQUESTED.decode(topics, data)
