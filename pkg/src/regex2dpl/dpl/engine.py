"""Non-backtracking pattern execution.

Matching starts at offset 0 only and runs each fragment once, left to
right.  Quantified matchers are possessive: they consume as much as they
can and never release characters afterwards.  The two exceptions, by
design, are alternation branches and optional groups, which are proper
choice points retried when the rest of the pattern fails, and the LD/DATA
matchers, which consume *minimally* up to the first position where their
successor matches and then commit to it forever.

A released-characters counter records how much consumed input was handed
back when a choice point moved on to its next option; outside those
retries it stays at zero, which is the non-backtracking guarantee in
measurable form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .builtins import CHAR_KINDS, TOKEN_KINDS, char_test, consume_token, type_name
from .nodes import (
    BuiltIn,
    DplAlternation,
    DplCharClass,
    DplGroup,
    DplLookahead,
    DplPattern,
    DplQuantifier,
    Fragment,
    QuotedLiteral,
    effective_bounds,
)


class UnsupportedMatcherError(Exception):
    """The pattern contains a matcher this engine cannot execute."""


@dataclass(frozen=True)
class ExportValue:
    text: str
    type: str = "string"
    value: object = None

    def to_json(self) -> dict:
        return {"text": self.text, "type": self.type, "value": self.value}


@dataclass
class DplMatchResult:
    matched: bool
    end: int | None
    exports: dict[str, ExportValue] = field(default_factory=dict)
    released: int = 0

    def to_json(self) -> dict:
        return {
            "matched": self.matched,
            "end": self.end,
            "exports": {name: v.to_json() for name, v in self.exports.items()},
        }


class _Ctx:
    __slots__ = ("text", "exports", "released", "reach")

    def __init__(self, text: str):
        self.text = text
        self.exports: dict[str, ExportValue] = {}
        self.released = 0
        self.reach = 0

    def touch(self, pos: int) -> None:
        if pos > self.reach:
            self.reach = pos


def dpl_match(p: DplPattern, text: str) -> DplMatchResult:
    ctx = _Ctx(text)
    end_box: dict = {}

    def accept(pos: int) -> bool:
        end_box["end"] = pos
        return True

    ok = _frags(p.fragments, 0, 0, ctx, accept)
    if ok:
        return DplMatchResult(True, end_box["end"], dict(ctx.exports), ctx.released)
    return DplMatchResult(False, None, {}, ctx.released)


# ---------------------------------------------------------------------------
# Core recursion
# ---------------------------------------------------------------------------


def _attempt(ctx: _Ctx, base: int, thunk) -> bool:
    """Run one choice-point option; on failure restore exports and count
    how many consumed characters the option is giving back."""
    saved_exports = dict(ctx.exports)
    saved_reach = ctx.reach
    ctx.reach = base
    ok = thunk()
    attempt_reach = ctx.reach
    ctx.reach = max(saved_reach, attempt_reach)
    if not ok:
        ctx.released += max(0, attempt_reach - base)
        ctx.exports.clear()
        ctx.exports.update(saved_exports)
    return ok


def _set_export(ctx: _Ctx, f: Fragment, start: int, end: int, typed=None) -> None:
    if f.export is None:
        return
    text = ctx.text[start:end]
    if typed is not None:
        ctx.exports[f.export.name] = ExportValue(text, typed[0], typed[1])
    else:
        ctx.exports[f.export.name] = ExportValue(text)


def _frags(frags: tuple[Fragment, ...], i: int, pos: int, ctx: _Ctx, k) -> bool:
    if i == len(frags):
        return k(pos)
    f = frags[i]
    m = f.matcher
    lo, hi = effective_bounds(m, f.quantifier)

    if isinstance(m, BuiltIn) and m.kind in ("LD", "DATA"):
        return _match_ld(frags, i, pos, ctx, k, lo, hi)

    if isinstance(m, DplGroup):
        if m.array:
            raise UnsupportedMatcherError("repetition group (ARRAY) is not executable")
        return _match_group(frags, i, pos, ctx, k, lo, hi)

    if isinstance(m, DplAlternation):
        return _match_alternation(frags, i, pos, ctx, k, lo, hi)

    if isinstance(m, DplLookahead):
        saved = dict(ctx.exports)
        if _first(m.body, pos, ctx) is None:
            ctx.exports.clear()
            ctx.exports.update(saved)
            return False
        _set_export(ctx, f, pos, pos)
        return _frags(frags, i + 1, pos, ctx, k)

    end, typed = _munch(m, lo, hi, pos, ctx)
    if end is None:
        return False
    ctx.touch(end)
    _set_export(ctx, f, pos, end, typed)
    return _frags(frags, i + 1, end, ctx, k)


def _munch(m, lo: int, hi: int | None, pos: int, ctx: _Ctx):
    """Deterministic possessive consumption for non-choice matchers.

    Returns (end, typed) where typed is a (type, value) pair when a single
    typed token was consumed; (None, None) on failure.
    """
    text = ctx.text

    if isinstance(m, BuiltIn) and m.kind in ("BOS", "EOS"):
        here = pos == 0 if m.kind == "BOS" else pos == len(text)
        if here or lo == 0:
            return pos, None
        return None, None

    if isinstance(m, DplCharClass) or (isinstance(m, BuiltIn) and m.kind in CHAR_KINDS):
        if isinstance(m, DplCharClass):
            test = lambda c: _class_test(m, c)
        else:
            test = lambda c: char_test(m.kind, c)
        limit = len(text) if hi is None else min(len(text), pos + hi)
        end = pos
        while end < limit and test(text[end]):
            end += 1
        if end - pos < lo:
            return None, None
        return end, None

    if isinstance(m, BuiltIn) and m.kind in TOKEN_KINDS:
        count = 0
        cur = pos
        last_value = None
        while hi is None or count < hi:
            step = consume_token(m.kind, text, cur, m.format)
            if step is None:
                break
            token_end, last_value = step
            if token_end == cur:
                break
            cur = token_end
            count += 1
        if count < lo:
            return None, None
        typed = (type_name(m.kind), last_value) if count == 1 else None
        return cur, typed

    if isinstance(m, QuotedLiteral):
        unit = m.text
        count = 0
        cur = pos
        while (hi is None or count < hi) and unit and text.startswith(unit, cur):
            cur += len(unit)
            count += 1
        if not unit:
            count = lo
        if count < lo:
            return None, None
        return cur, None

    raise TypeError("unknown matcher: %r" % (m,))


def _class_test(m: DplCharClass, c: str) -> bool:
    hit = any(
        (item[0] <= c <= item[1]) if isinstance(item, tuple) else c == item
        for item in m.items
    )
    return hit != m.negated


# ---------------------------------------------------------------------------
# Groups, alternations, lookahead bodies
# ---------------------------------------------------------------------------


def _match_group(frags, i, pos, ctx, k, lo, hi):
    f = frags[i]
    m: DplGroup = f.matcher

    def transparent() -> bool:
        def done(end: int) -> bool:
            _set_export(ctx, f, pos, end)
            return _frags(frags, i + 1, end, ctx, k)

        return _frags(m.fragments, 0, pos, ctx, done)

    if (lo, hi) == (1, 1):
        return transparent()
    if (lo, hi) == (0, 1):
        if _attempt(ctx, pos, transparent):
            return True
        return _frags(frags, i + 1, pos, ctx, k)
    return _match_repeated(frags, i, pos, ctx, k, lo, hi, m.fragments)


def _match_alternation(frags, i, pos, ctx, k, lo, hi):
    f = frags[i]
    m: DplAlternation = f.matcher

    def try_branches() -> bool:
        for branch in m.branches:
            def run(branch=branch) -> bool:
                def done(end: int) -> bool:
                    _set_export(ctx, f, pos, end)
                    return _frags(frags, i + 1, end, ctx, k)

                return _frags(branch, 0, pos, ctx, done)

            if _attempt(ctx, pos, run):
                return True
        return False

    if (lo, hi) in ((1, 1), (0, 1)):
        if try_branches():
            return True
        if (lo, hi) == (0, 1):
            return _frags(frags, i + 1, pos, ctx, k)
        return False

    def one_unit(at: int) -> int | None:
        for branch in m.branches:
            end = _first(branch, at, ctx)
            if end is not None:
                return end
        return None

    return _match_repeated(frags, i, pos, ctx, k, lo, hi, None, one_unit)


def _match_repeated(frags, i, pos, ctx, k, lo, hi, body, one_unit=None):
    """Possessive repetition of a composite: each unit locks its first
    successful parse, the repetition count locks at the maximum reached."""
    f = frags[i]
    if one_unit is None:
        one_unit = lambda at: _first(body, at, ctx)
    count = 0
    cur = pos
    while hi is None or count < hi:
        end = one_unit(cur)
        if end is None:
            break
        if end == cur:  # zero-width unit: repetition cannot progress
            break
        cur = end
        count += 1
    if count < lo:
        return False
    ctx.touch(cur)
    _set_export(ctx, f, pos, cur)
    return _frags(frags, i + 1, cur, ctx, k)


def _first(body: tuple[Fragment, ...], pos: int, ctx: _Ctx) -> int | None:
    """First successful parse of a fragment sequence; exports it set persist."""
    box: dict = {}

    def acc(end: int) -> bool:
        box["end"] = end
        return True

    return box["end"] if _frags(body, 0, pos, ctx, acc) else None


# ---------------------------------------------------------------------------
# LD / DATA: minimal consumption committed at the successor
# ---------------------------------------------------------------------------


def _match_ld(frags, i, pos, ctx, k, lo, hi):
    f = frags[i]
    kind = f.matcher.kind
    text = ctx.text

    limit = len(text) if hi is None else min(len(text), pos + hi)
    if pos + lo > limit or any(not char_test(kind, text[pos + d]) for d in range(lo)):
        return False
    start_scan = pos + lo

    # candidate successors: nearest first, stepping over optional fragments;
    # None means "no successor", where LD keeps its minimum
    options: list[int | None] = []
    j = i + 1
    while j < len(frags):
        options.append(j)
        succ = frags[j]
        succ_lo, _ = effective_bounds(succ.matcher, succ.quantifier)
        if succ_lo != 0:
            break
        j += 1
    else:
        options.append(None)

    for option in options:
        def run(option=option) -> bool:
            if option is None:
                ctx.touch(start_scan)
                _set_export(ctx, f, pos, start_scan)
                return _frags(frags, i + 1, start_scan, ctx, k)
            cur = start_scan
            while True:
                if _test_fragment(frags[option], cur, ctx):
                    ctx.touch(cur)
                    _set_export(ctx, f, pos, cur)
                    return _frags(frags, i + 1, cur, ctx, k)
                if cur < limit and char_test(kind, text[cur]):
                    cur += 1
                else:
                    return False

        if _attempt(ctx, pos, run):
            return True
    return False


def _test_fragment(f: Fragment, pos: int, ctx: _Ctx) -> bool:
    """Would this fragment match at ``pos``?  Pure: all state restored.

    Optional bounds are forced to at least one application so the test is
    meaningful as a scan target.
    """
    m = f.matcher
    lo, hi = effective_bounds(m, f.quantifier)
    if not (isinstance(m, BuiltIn) and m.kind in ("BOS", "EOS")):
        lo = max(lo, 1)
        q = DplQuantifier("range", lo, hi)
        f = Fragment(m, q)
    saved_exports = dict(ctx.exports)
    saved_reach = ctx.reach
    saved_released = ctx.released
    ok = _frags((f,), 0, pos, ctx, lambda end: True)
    ctx.exports.clear()
    ctx.exports.update(saved_exports)
    ctx.reach = saved_reach
    ctx.released = saved_released
    return ok
