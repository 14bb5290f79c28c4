"""Canonical payload and event layout.

A call payload is a 4-byte selector followed by the encoded fields; event
data is the encoded fields alone, and an event's first topic is the digest
of its signature. Selector = first 4 bytes of the same digest.

Field kinds:

* ``Uint(width)`` - fixed-width lowercase hex ASCII, ``width`` characters
* ``Text`` - one length byte, then UTF-8 (at most 255 bytes)
* ``Flag`` - ASCII ``1`` or ``0``

Integers and flags are ASCII so every byte is nonzero; calldata gas then
depends only on the layout and the text lengths, never on the values.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Any, Mapping, Sequence


class CodecError(ValueError):
    pass


@dataclass(frozen=True)
class Uint:
    width: int

    @property
    def max_value(self) -> int:
        return 16**self.width - 1

    def encode(self, value: Any) -> bytes:
        if isinstance(value, bool) or not isinstance(value, int):
            raise CodecError(f"expected int, got {value!r}")
        if not 0 <= value <= self.max_value:
            raise CodecError(f"{value} does not fit in {self.width} hex digits")
        return format(value, f"0{self.width}x").encode("ascii")

    def decode(self, data: bytes, offset: int) -> tuple[int, int]:
        end = offset + self.width
        chunk = data[offset:end]
        if len(chunk) != self.width:
            raise CodecError("truncated uint field")
        try:
            text = chunk.decode("ascii")
        except UnicodeDecodeError as exc:
            raise CodecError("uint field is not ASCII") from exc
        if any(ch not in "0123456789abcdef" for ch in text):
            raise CodecError(f"uint field {text!r} is not lowercase hex")
        return int(text, 16), end


class _Text:
    def encode(self, value: Any) -> bytes:
        if not isinstance(value, str):
            raise CodecError(f"expected str, got {value!r}")
        raw = value.encode("utf-8")
        if len(raw) > 255:
            raise CodecError("text field longer than 255 bytes")
        return bytes([len(raw)]) + raw

    def decode(self, data: bytes, offset: int) -> tuple[str, int]:
        if offset >= len(data):
            raise CodecError("truncated text length")
        end = offset + 1 + data[offset]
        if end > len(data):
            raise CodecError("truncated text field")
        try:
            return data[offset + 1:end].decode("utf-8"), end
        except UnicodeDecodeError as exc:
            raise CodecError("text field is not UTF-8") from exc


class _Flag:
    def encode(self, value: Any) -> bytes:
        if not isinstance(value, bool):
            raise CodecError(f"expected bool, got {value!r}")
        return b"1" if value else b"0"

    def decode(self, data: bytes, offset: int) -> tuple[bool, int]:
        chunk = data[offset:offset + 1]
        if chunk not in (b"0", b"1"):
            raise CodecError(f"bad flag byte {chunk!r}")
        return chunk == b"1", offset + 1


Text = _Text()
Flag = _Flag()

Schema = Sequence[tuple[str, Any]]


def signature_digest(signature: str) -> str:
    return "0x" + hashlib.sha3_256(signature.encode()).hexdigest()


def selector(signature: str) -> bytes:
    return bytes.fromhex(signature_digest(signature)[2:10])


def encode_fields(schema: Schema, values: Mapping[str, Any]) -> bytes:
    try:
        return b"".join(kind.encode(values[name]) for name, kind in schema)
    except KeyError as exc:
        raise CodecError(f"missing field {exc.args[0]!r}") from None


def decode_fields(schema: Schema, data: bytes, offset: int = 0) -> tuple[dict[str, Any], int]:
    out = {}
    for name, kind in schema:
        out[name], offset = kind.decode(data, offset)
    return out, offset


def decode_exact(schema: Schema, data: bytes, offset: int = 0) -> dict[str, Any]:
    values, end = decode_fields(schema, data, offset)
    if end != len(data):
        raise CodecError(f"{len(data) - end} trailing bytes")
    return values


@dataclass(frozen=True)
class Function:
    """A contract entry point: signature plus argument layout."""

    signature: str
    args: tuple[tuple[str, Any], ...]

    @property
    def selector(self) -> bytes:
        return selector(self.signature)

    def encode_call(self, **values: Any) -> bytes:
        return self.selector + encode_fields(self.args, values)

    def decode_call(self, payload: bytes) -> dict[str, Any]:
        if payload[:4] != self.selector:
            raise CodecError(f"payload is not a call to {self.signature}")
        return decode_exact(self.args, payload, 4)


@dataclass(frozen=True)
class Event:
    signature: str
    fields: tuple[tuple[str, Any], ...]

    @property
    def topic(self) -> str:
        return signature_digest(self.signature)

    def encode(self, **values: Any) -> tuple[tuple[str, ...], bytes]:
        return (self.topic,), encode_fields(self.fields, values)

    def decode(self, topics: Sequence[str], data: bytes) -> dict[str, Any]:
        if not topics or topics[0] != self.topic:
            raise CodecError(f"event is not {self.signature}")
        return decode_exact(self.fields, data)
