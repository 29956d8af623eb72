"""Built-in matcher acceptance: per-character predicates and typed tokens."""

from __future__ import annotations

import ipaddress
import re
from datetime import datetime

from .nodes import DEFAULT_TIMESTAMP_FORMAT

INT_MIN, INT_MAX = -(2**31), 2**31 - 1
LONG_MIN, LONG_MAX = -(2**63), 2**63 - 1

_SPACE_CHARS = " \t\n\r\f\v"

CHAR_KINDS = ("DIGIT", "WORD", "SPACE", "NSPACE", "LF", "LD", "DATA")
TOKEN_KINDS = ("INT", "LONG", "DOUBLE", "IPADDR", "IPV4", "TIMESTAMP")

_TYPE_NAMES = {
    "INT": "int",
    "LONG": "long",
    "DOUBLE": "double",
    "IPADDR": "ipaddr",
    "IPV4": "ipv4",
    "TIMESTAMP": "timestamp",
}


def type_name(kind: str) -> str:
    return _TYPE_NAMES.get(kind, "string")


def char_test(kind: str, c: str) -> bool:
    if kind == "DIGIT":
        return "0" <= c <= "9"
    if kind == "WORD":
        return c.isascii() and (c.isalnum() or c == "_")
    if kind == "SPACE":
        return c in _SPACE_CHARS
    if kind == "NSPACE":
        return c not in _SPACE_CHARS
    if kind == "LF":
        return c == "\n"
    if kind == "LD":
        return c != "\n"
    if kind == "DATA":
        return True
    raise ValueError("not a character matcher: %r" % kind)


_NUMBER = re.compile(r"[+-]?[0-9]+")
_DOUBLE = re.compile(r"[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")
_IP_RUN = re.compile(r"[0-9A-Fa-f:.]{1,64}")
_IPV4_RUN = re.compile(r"[0-9.]{1,16}")


def _consume_bounded_int(text: str, pos: int, low: int, high: int):
    m = _NUMBER.match(text, pos)
    if not m:
        return None
    value = int(m.group())
    if not low <= value <= high:
        return None
    return m.end(), value


def _consume_ip(text: str, pos: int, v4_only: bool):
    run = (_IPV4_RUN if v4_only else _IP_RUN).match(text, pos)
    if not run:
        return None
    candidate = run.group()
    factory = ipaddress.IPv4Address if v4_only else ipaddress.ip_address
    # longest valid prefix of the plausible character run
    for end in range(len(candidate), 0, -1):
        try:
            factory(candidate[:end])
        except ValueError:
            continue
        return pos + end, candidate[:end]
    return None


_FORMAT_FIELDS = {"yyyy": ("year", 4), "MM": ("month", 2), "dd": ("day", 2), "HH": ("hour", 2), "mm": ("minute", 2), "ss": ("second", 2)}


def parse_timestamp_format(fmt: str) -> list[tuple[str, ...]]:
    """Split a format string into numeric-field and literal tokens."""
    tokens: list[tuple[str, ...]] = []
    i = 0
    while i < len(fmt):
        for key, (fieldname, width) in _FORMAT_FIELDS.items():
            if fmt.startswith(key, i):
                tokens.append(("num", fieldname, str(width)))
                i += len(key)
                break
        else:
            tokens.append(("lit", fmt[i]))
            i += 1
    return tokens


def _consume_timestamp(text: str, pos: int, fmt: str | None):
    tokens = parse_timestamp_format(fmt or DEFAULT_TIMESTAMP_FORMAT)
    fields = {"year": 2000, "month": 1, "day": 1, "hour": 0, "minute": 0, "second": 0}
    p = pos
    for token in tokens:
        if token[0] == "lit":
            if not text.startswith(token[1], p):
                return None
            p += 1
            continue
        _, fieldname, width_s = token
        width = int(width_s)
        digits = text[p : p + width]
        if len(digits) != width or not digits.isdigit():
            return None
        fields[fieldname] = int(digits)
        p += width
    try:
        datetime(**fields)
    except ValueError:
        return None
    return p, text[pos:p]


def consume_token(kind: str, text: str, pos: int, fmt: str | None = None):
    """Match one typed token at ``pos``; returns (end, value) or None."""
    if kind == "INT":
        return _consume_bounded_int(text, pos, INT_MIN, INT_MAX)
    if kind == "LONG":
        return _consume_bounded_int(text, pos, LONG_MIN, LONG_MAX)
    if kind == "DOUBLE":
        m = _DOUBLE.match(text, pos)
        return (m.end(), float(m.group())) if m else None
    if kind == "IPADDR":
        return _consume_ip(text, pos, v4_only=False)
    if kind == "IPV4":
        return _consume_ip(text, pos, v4_only=True)
    if kind == "TIMESTAMP":
        return _consume_timestamp(text, pos, fmt)
    raise ValueError("not a token matcher: %r" % kind)


def builtin_accepts(kind: str, text: str, fmt: str | None = None) -> bool:
    """Whole-string acceptance for one built-in matcher at default bounds."""
    if kind in ("BOS", "EOS"):
        return text == ""
    if kind in ("LD", "DATA"):
        return all(char_test(kind, c) for c in text)
    if kind in CHAR_KINDS:
        return len(text) >= 1 and all(char_test(kind, c) for c in text)
    result = consume_token(kind, text, 0, fmt)
    return result is not None and result[0] == len(text)
