"""Pattern-language model and its canonical text and JSON forms.

A pattern is a flat sequence of fragments.  Each fragment pairs one matcher
with an optional quantifier and an optional export name, plus bookkeeping
the converter fills in (origin span in the source regex, unsafe reason).

Quantifier semantics live in the engine; this module only records shape.
One wrinkle worth stating here: ``?`` is not ``{0,1}``.  It makes the
matcher *with its default quantifier* optional, so ``DIGIT?`` means
``DIGIT{0,4096}`` while a group's default is one application and group-``?``
collapses to try-once-or-skip.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

BUILTIN_KINDS = (
    "LD",
    "DATA",
    "DIGIT",
    "SPACE",
    "NSPACE",
    "WORD",
    "LF",
    "BOS",
    "EOS",
    "IPADDR",
    "IPV4",
    "INT",
    "LONG",
    "DOUBLE",
    "TIMESTAMP",
)

DEFAULT_TIMESTAMP_FORMAT = "yyyy-MM-dd HH:mm:ss"

_RUN_CAP = 4096

_UNQUOTED_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class EmptyPattern(ValueError):
    """Serialization was asked for a pattern with no fragments."""


@dataclass(frozen=True)
class DplQuantifier:
    kind: str  # "optional" | "star" | "plus" | "range"
    min: int | None = None
    max: int | None = None  # None in "range" means unbounded ({x,})

    def text(self) -> str:
        if self.kind == "optional":
            return "?"
        if self.kind == "star":
            return "*"
        if self.kind == "plus":
            return "+"
        if self.max is None:
            return "{%d,}" % self.min
        if self.min == self.max:
            return "{%d}" % self.min
        return "{%d,%d}" % (self.min, self.max)


@dataclass(frozen=True)
class ExportName:
    name: str
    quoted: bool = False

    def text(self) -> str:
        if self.quoted or not _UNQUOTED_NAME.match(self.name):
            return '"%s"' % _escape_quoted(self.name)
        return self.name


@dataclass(frozen=True)
class QuotedLiteral:
    text: str


@dataclass(frozen=True)
class BuiltIn:
    kind: str
    format: str | None = None  # TIMESTAMP only
    spelling: str | None = None  # non-canonical source spelling, e.g. IPv4


@dataclass(frozen=True)
class DplCharClass:
    items: tuple[Union[str, tuple[str, str]], ...]
    negated: bool = False


@dataclass(frozen=True)
class DplGroup:
    fragments: tuple["Fragment", ...]
    array: bool = False  # ARRAY{...}: serialized repetition-group form


@dataclass(frozen=True)
class DplAlternation:
    branches: tuple[tuple["Fragment", ...], ...]


@dataclass(frozen=True)
class DplLookahead:
    body: tuple["Fragment", ...]


DplMatcher = Union[QuotedLiteral, BuiltIn, DplCharClass, DplGroup, DplAlternation, DplLookahead]


@dataclass(frozen=True)
class Fragment:
    matcher: DplMatcher
    quantifier: DplQuantifier | None = None
    export: ExportName | None = None
    unsafe_reason: str | None = None
    origin_span: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class DplPattern:
    fragments: tuple[Fragment, ...]


# ---------------------------------------------------------------------------
# Quantifier resolution
# ---------------------------------------------------------------------------


def builtin_default_bounds(matcher: DplMatcher) -> tuple[int, int | None]:
    """Default run bounds a bare matcher carries without any quantifier."""
    if isinstance(matcher, BuiltIn):
        if matcher.kind in ("DIGIT", "WORD", "SPACE", "NSPACE"):
            return (1, _RUN_CAP)
        if matcher.kind in ("LD", "DATA"):
            return (0, _RUN_CAP)
    return (1, 1)


def effective_bounds(fragment_matcher: DplMatcher, q: DplQuantifier | None) -> tuple[int, int | None]:
    lo, hi = builtin_default_bounds(fragment_matcher)
    if q is None:
        return (lo, hi)
    if q.kind == "optional":
        return (0, hi)
    if q.kind == "star":
        return (0, None)
    if q.kind == "plus":
        return (1, None)
    return (q.min, q.max)


# ---------------------------------------------------------------------------
# Canonical text
# ---------------------------------------------------------------------------


def _escape_quoted(text: str) -> str:
    out = []
    for c in text:
        if c in ('"', "'", "\\"):
            out.append("\\")
        out.append(c)
    return "".join(out)


_CLASS_SPECIALS = set("]^-\\")


def _class_item_text(item: Union[str, tuple[str, str]], first: bool) -> str:
    def one(c: str) -> str:
        if c in _CLASS_SPECIALS and not (c == "^" and not first):
            return "\\" + c
        return c

    if isinstance(item, tuple):
        return "%s-%s" % (one(item[0]), one(item[1]))
    return one(item)


def _matcher_text(m: DplMatcher) -> str:
    if isinstance(m, QuotedLiteral):
        return '"%s"' % _escape_quoted(m.text)
    if isinstance(m, BuiltIn):
        name = m.spelling or m.kind
        if m.kind == "TIMESTAMP" and m.format is not None:
            return "%s('%s')" % (name, m.format)
        return name
    if isinstance(m, DplCharClass):
        inner = "".join(_class_item_text(item, i == 0) for i, item in enumerate(m.items))
        return "[%s%s]" % ("^" if m.negated else "", inner)
    if isinstance(m, DplGroup):
        body = " ".join(_fragment_text(f) for f in m.fragments)
        return ("ARRAY{%s}" if m.array else "(%s)") % body
    if isinstance(m, DplAlternation):
        return "(%s)" % "|".join(
            " ".join(_fragment_text(f) for f in branch) for branch in m.branches
        )
    if isinstance(m, DplLookahead):
        if len(m.body) == 1 and m.body[0].quantifier is None and m.body[0].export is None:
            return ">>" + _matcher_text(m.body[0].matcher)
        return ">>(%s)" % " ".join(_fragment_text(f) for f in m.body)
    raise TypeError("unknown matcher: %r" % (m,))


def _fragment_text(f: Fragment) -> str:
    out = _matcher_text(f.matcher)
    if f.quantifier is not None:
        out += f.quantifier.text()
    if f.export is not None:
        out += ":" + f.export.text()
    return out


def serialize_with_spans(p: DplPattern) -> tuple[str, list[tuple[int, int]]]:
    """Canonical text plus the output span of each top-level fragment."""
    if not p.fragments:
        raise EmptyPattern("pattern has no fragments")
    parts = []
    spans = []
    pos = 0
    for f in p.fragments:
        if parts:
            pos += 1
        text = _fragment_text(f)
        parts.append(text)
        spans.append((pos, pos + len(text)))
        pos += len(text)
    return " ".join(parts), spans


def serialize_pattern(p: DplPattern) -> str:
    return serialize_with_spans(p)[0]


# ---------------------------------------------------------------------------
# JSON form
# ---------------------------------------------------------------------------


def _matcher_to_json(m: DplMatcher) -> dict:
    if isinstance(m, QuotedLiteral):
        return {"type": "literal", "text": m.text}
    if isinstance(m, BuiltIn):
        out: dict = {"type": "builtin", "kind": m.kind}
        if m.format is not None:
            out["format"] = m.format
        if m.spelling is not None:
            out["spelling"] = m.spelling
        return out
    if isinstance(m, DplCharClass):
        items = [list(i) if isinstance(i, tuple) else i for i in m.items]
        return {"type": "class", "items": items, "negated": m.negated}
    if isinstance(m, DplGroup):
        return {
            "type": "group",
            "fragments": [_fragment_to_json(f) for f in m.fragments],
            "array": m.array,
        }
    if isinstance(m, DplAlternation):
        return {
            "type": "alternation",
            "branches": [[_fragment_to_json(f) for f in b] for b in m.branches],
        }
    if isinstance(m, DplLookahead):
        return {"type": "lookahead", "body": [_fragment_to_json(f) for f in m.body]}
    raise TypeError("unknown matcher: %r" % (m,))


def _fragment_to_json(f: Fragment) -> dict:
    return {
        "matcher": _matcher_to_json(f.matcher),
        "quantifier": f.quantifier.text() if f.quantifier else None,
        "export": {"name": f.export.name, "quoted": f.export.quoted} if f.export else None,
        "unsafe_reason": f.unsafe_reason,
        "origin_span": list(f.origin_span) if f.origin_span else None,
    }


def pattern_to_json(p: DplPattern) -> dict:
    return {"fragments": [_fragment_to_json(f) for f in p.fragments]}


def _quantifier_from_text(text: str) -> DplQuantifier:
    if text == "?":
        return DplQuantifier("optional")
    if text == "*":
        return DplQuantifier("star")
    if text == "+":
        return DplQuantifier("plus")
    body = text[1:-1]
    if "," not in body:
        n = int(body)
        return DplQuantifier("range", n, n)
    lo, hi = body.split(",", 1)
    return DplQuantifier("range", int(lo) if lo else 0, int(hi) if hi else None)


def _matcher_from_json(d: dict) -> DplMatcher:
    t = d["type"]
    if t == "literal":
        return QuotedLiteral(d["text"])
    if t == "builtin":
        return BuiltIn(d["kind"], d.get("format"), d.get("spelling"))
    if t == "class":
        items = tuple(tuple(i) if isinstance(i, list) else i for i in d["items"])
        return DplCharClass(items, d.get("negated", False))
    if t == "group":
        return DplGroup(
            tuple(_fragment_from_json(f) for f in d["fragments"]), d.get("array", False)
        )
    if t == "alternation":
        return DplAlternation(
            tuple(tuple(_fragment_from_json(f) for f in b) for b in d["branches"])
        )
    if t == "lookahead":
        return DplLookahead(tuple(_fragment_from_json(f) for f in d["body"]))
    raise ValueError("unknown matcher type: %r" % t)


def _fragment_from_json(d: dict) -> Fragment:
    export = None
    if d.get("export"):
        export = ExportName(d["export"]["name"], d["export"].get("quoted", False))
    return Fragment(
        matcher=_matcher_from_json(d["matcher"]),
        quantifier=_quantifier_from_text(d["quantifier"]) if d.get("quantifier") else None,
        export=export,
        unsafe_reason=d.get("unsafe_reason"),
        origin_span=tuple(d["origin_span"]) if d.get("origin_span") else None,
    )


def pattern_from_json(d: dict) -> DplPattern:
    return DplPattern(tuple(_fragment_from_json(f) for f in d["fragments"]))
