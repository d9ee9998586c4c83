"""Truth-table files: ``n=<int>`` on line 1, a hex string on line 2.

The hex string has exactly ``ceil(2^n / 4)`` digits, most significant digit
first; table entry ``i`` is bit ``i`` of the integer it encodes.
"""
from __future__ import annotations

import json
import os

import numpy as np

from .boolfn import MAX_CLASSICAL_N, BooleanFunction, anf_monomials

_HEX = set("0123456789abcdefABCDEF")


class TableFormatError(ValueError):
    """Malformed truth-table text; ``offset`` is the byte offset of the fault."""

    def __init__(self, offset: int, message: str):
        super().__init__(f"byte {offset}: {message}")
        self.offset = offset


def hex_digits(n: int) -> int:
    return -(-(1 << n) // 4)


def format_table(f: BooleanFunction) -> str:
    packed = np.packbits(f.table, bitorder="little")
    value = int.from_bytes(packed.tobytes(), "little")
    return f"n={f.n}\n{value:0{hex_digits(f.n)}x}\n"


def parse_table(text: str | bytes) -> BooleanFunction:
    if isinstance(text, bytes):
        try:
            text = text.decode("ascii")
        except UnicodeDecodeError as exc:
            raise TableFormatError(exc.start, "non-ASCII byte") from None
    first, sep, rest = text.partition("\n")
    header = first.rstrip("\r")
    if not header.startswith("n="):
        raise TableFormatError(0, "header must read 'n=<int>'")
    body = header[2:]
    if not body.isdigit():
        raise TableFormatError(2, f"bad header value {body!r}")
    n = int(body)
    if not 1 <= n <= MAX_CLASSICAL_N:
        raise TableFormatError(2, f"n={n} outside supported range [1, {MAX_CLASSICAL_N}]")
    start = len(first) + len(sep)
    if not sep:
        raise TableFormatError(start, "missing hex line")
    digits = rest.split("\n", 1)[0].rstrip("\r")
    for i, ch in enumerate(digits):
        if ch not in _HEX:
            raise TableFormatError(start + i, f"invalid hex digit {ch!r}")
    want = hex_digits(n)
    if len(digits) != want:
        raise TableFormatError(start + min(len(digits), want),
                               f"expected {want} hex digits for n={n}, got {len(digits)}")
    value = int(digits, 16)
    size = 1 << n
    if value >> size:
        raise TableFormatError(start, f"value has bits set beyond the 2^{n} table entries")
    raw = value.to_bytes(max(1, size // 8), "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:size]
    return BooleanFunction(n, bits)


def read_table(path: str | os.PathLike) -> BooleanFunction:
    with open(path, "rb") as fh:
        return parse_table(fh.read())


def write_table(f: BooleanFunction, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_table(f))


def anf_json(f: BooleanFunction) -> str:
    return json.dumps(anf_monomials(f))
