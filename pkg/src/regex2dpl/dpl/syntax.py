"""Structural validity checks, reported as diagnostics instead of raised."""

from __future__ import annotations

import re

from .builtins import parse_timestamp_format
from .nodes import (
    BUILTIN_KINDS,
    BuiltIn,
    DplAlternation,
    DplCharClass,
    DplGroup,
    DplLookahead,
    DplPattern,
    Fragment,
)

_UNQUOTED_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


def validate_syntax(p: DplPattern) -> list[str]:
    """Empty list iff the pattern satisfies every structural invariant."""
    diagnostics: list[str] = []
    seen_exports: dict[str, int] = {}

    def check_fragment(f: Fragment) -> None:
        if f.export is not None:
            name = f.export.name
            seen_exports[name] = seen_exports.get(name, 0) + 1
            if seen_exports[name] == 2:
                diagnostics.append("duplicate export name %r" % name)
            if not f.export.quoted and not _UNQUOTED_NAME.match(name):
                diagnostics.append(
                    "export name %r must start with a letter and use letters, digits, or underscores (or be quoted)"
                    % name
                )
        q = f.quantifier
        if q is not None and q.kind == "range":
            if q.min is None or q.min < 0:
                diagnostics.append("quantifier lower bound missing or negative")
            elif q.max is not None and q.max < q.min:
                diagnostics.append(
                    "quantifier bounds reversed: {%d,%d}" % (q.min, q.max)
                )
        check_matcher(f.matcher)

    def check_matcher(m) -> None:
        if isinstance(m, BuiltIn):
            if m.kind not in BUILTIN_KINDS:
                diagnostics.append("unknown matcher kind %r" % m.kind)
            if m.kind == "TIMESTAMP" and m.format is not None:
                tokens = parse_timestamp_format(m.format)
                if not any(t[0] == "num" for t in tokens):
                    diagnostics.append(
                        "timestamp format %r has no date or time fields" % m.format
                    )
        elif isinstance(m, DplCharClass):
            if not m.items:
                diagnostics.append("empty character class")
            for item in m.items:
                if isinstance(item, tuple) and item[1] < item[0]:
                    diagnostics.append(
                        "reversed class range %s-%s" % (item[0], item[1])
                    )
        elif isinstance(m, DplGroup):
            if not m.fragments:
                diagnostics.append("empty group")
            for inner in m.fragments:
                check_fragment(inner)
        elif isinstance(m, DplAlternation):
            for branch in m.branches:
                if not branch:
                    diagnostics.append("empty alternation branch")
                for inner in branch:
                    check_fragment(inner)
        elif isinstance(m, DplLookahead):
            if not m.body:
                diagnostics.append("empty lookahead")
            for inner in m.body:
                check_fragment(inner)

    if not p.fragments:
        diagnostics.append("pattern has no fragments")
    for f in p.fragments:
        check_fragment(f)
    return diagnostics
