"""Backtracking reference matcher with PCRE-style leftmost-first semantics.

This matcher is the behavioral oracle for the whole toolkit: greedy
quantifiers prefer the longest repetition and give characters back on
failure, lazy quantifiers prefer the shortest and expand, possessive
quantifiers consume maximally and never release.  Matching is unanchored
(the first start offset with a match wins) unless the pattern itself anchors
with ``^``.

The implementation is continuation-passing: ``k(pos)`` receives the position
after a node matched and returns whether the rest of the pattern succeeded,
which gives exact backtracking behavior for every mode.  Single-character
atoms take an iterative fast path so common patterns never recurse deeply.
A step budget bounds runaway backtracking.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .nodes import (
    Alternation,
    Anchor,
    CharClass,
    CharRep,
    ClassChar,
    ClassRange,
    ClassShorthand,
    Dot,
    Group,
    Literal,
    Lookahead,
    Node,
    Quantified,
    RegexAst,
)

DEFAULT_STEP_BUDGET = 1_000_000

_SPACE_CHARS = " \t\n\r\f\v"


class StepLimitExceeded(RuntimeError):
    """The matcher exceeded its step budget (likely catastrophic backtracking)."""


@dataclass
class MatchResult:
    matched: bool
    span: tuple[int, int] | None = None
    captures: dict[str, str] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Character-level predicates (shared with the automata layer)
# ---------------------------------------------------------------------------


def shorthand_test(kind: str, c: str) -> bool:
    base = kind.lower()
    if base == "d":
        member = "0" <= c <= "9"
    elif base == "w":
        member = c.isascii() and (c.isalnum() or c == "_")
    else:
        member = c in _SPACE_CHARS
    return member != kind.isupper()


@lru_cache(maxsize=None)
def _class_parts(node: CharClass) -> tuple[frozenset[str], tuple[tuple[str, str], ...], tuple[str, ...]]:
    chars = frozenset(i.char for i in node.items if isinstance(i, ClassChar))
    ranges = tuple((i.lo, i.hi) for i in node.items if isinstance(i, ClassRange))
    shorthands = tuple(i.kind for i in node.items if isinstance(i, ClassShorthand))
    return chars, ranges, shorthands


def class_test(node: CharClass, c: str) -> bool:
    chars, ranges, shorthands = _class_parts(node)
    member = (
        c in chars
        or any(lo <= c <= hi for lo, hi in ranges)
        or any(shorthand_test(k, c) for k in shorthands)
    )
    return member != node.negated


def node_char_test(node: Node, c: str) -> bool:
    """Whether a single-character atom accepts character ``c``."""
    if isinstance(node, Literal):
        return node.text == c
    if isinstance(node, CharRep):
        return node.char == c
    if isinstance(node, Dot):
        return c != "\n"
    if isinstance(node, ClassShorthand):
        return shorthand_test(node.kind, c)
    if isinstance(node, CharClass):
        return class_test(node, c)
    raise TypeError("not a single-character atom: %r" % (node,))


def is_char_atom(node: Node) -> bool:
    """True for nodes that consume exactly one character, one way."""
    if isinstance(node, Literal):
        return len(node.text) == 1
    return isinstance(node, (CharRep, Dot, ClassShorthand, CharClass))


# ---------------------------------------------------------------------------
# Matching engine
# ---------------------------------------------------------------------------


class _Ctx:
    __slots__ = ("text", "budget", "steps", "captures")

    def __init__(self, text: str, budget: int):
        self.text = text
        self.budget = budget
        self.steps = 0
        self.captures: dict[str, tuple[int, int]] = {}

    def step(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise StepLimitExceeded("step budget of %d exceeded" % self.budget)


_Cont = Callable[[int], bool]


def _match_seq(nodes: tuple[Node, ...], i: int, pos: int, ctx: _Ctx, k: _Cont) -> bool:
    if i == len(nodes):
        return k(pos)
    return _match_node(nodes[i], pos, ctx, lambda p: _match_seq(nodes, i + 1, p, ctx, k))


def _match_node(node: Node, pos: int, ctx: _Ctx, k: _Cont) -> bool:
    ctx.step()
    text = ctx.text

    if isinstance(node, Literal):
        end = pos + len(node.text)
        return text.startswith(node.text, pos) and k(end)
    if isinstance(node, (CharRep, Dot, ClassShorthand, CharClass)):
        return pos < len(text) and node_char_test(node, text[pos]) and k(pos + 1)
    if isinstance(node, Anchor):
        if node.kind == "start":
            return pos == 0 and k(pos)
        return pos == len(text) and k(pos)
    if isinstance(node, Quantified):
        return _match_quantified(node, pos, ctx, k)
    if isinstance(node, Group):
        return _match_group(node, pos, ctx, k)
    if isinstance(node, Alternation):
        for branch in node.branches:
            if _match_seq(branch, 0, pos, ctx, k):
                return True
        return False
    if isinstance(node, Lookahead):
        return _match_lookahead(node, pos, ctx, k)
    raise TypeError("unknown node type: %r" % (node,))


def _match_quantified(node: Quantified, pos: int, ctx: _Ctx, k: _Cont) -> bool:
    q = node.quantifier
    child = node.child

    if is_char_atom(child):
        text = ctx.text
        limit = len(text) if q.max is None else min(len(text), pos + q.max)
        p = pos
        while p < limit and node_char_test(child, text[p]):
            p += 1
        most = p  # maximal munch end, already capped by q.max
        least = pos + q.min
        if most < least:
            return False
        if q.mode == "possessive":
            return k(most)
        ends = range(most, least - 1, -1) if q.mode == "greedy" else range(least, most + 1)
        for end in ends:
            ctx.step()
            if k(end):
                return True
        return False

    return _match_quantified_general(child, q, pos, ctx, k)


def _match_quantified_general(child: Node, q, pos: int, ctx: _Ctx, k: _Cont) -> bool:
    """Quantification over compound children, with full per-repetition backtracking.

    Repetitions that consume nothing are allowed only while still below the
    minimum count, which keeps nullable children from looping forever while
    preserving matches like ``(a?){2}`` on the empty string.
    """
    maximum = q.max

    def rep_greedy(count: int, p: int, done: _Cont) -> bool:
        ctx.step()
        if maximum is None or count < maximum:

            def cont(p2: int, _count: int = count, _p: int = p) -> bool:
                if p2 == _p and _count + 1 > q.min:
                    return False
                return rep_greedy(_count + 1, p2, done)

            if _match_node(child, p, ctx, cont):
                return True
        if count >= q.min:
            return done(p)
        return False

    def rep_lazy(count: int, p: int, done: _Cont) -> bool:
        ctx.step()
        if count >= q.min and done(p):
            return True
        if maximum is None or count < maximum:

            def cont(p2: int, _count: int = count, _p: int = p) -> bool:
                if p2 == _p and _count + 1 > q.min:
                    return False
                return rep_lazy(_count + 1, p2, done)

            return _match_node(child, p, ctx, cont)
        return False

    if q.mode == "greedy":
        return rep_greedy(0, pos, k)
    if q.mode == "lazy":
        return rep_lazy(0, pos, k)

    # Possessive: lock in the first (greedy-preferred) completion of the
    # repetition, then run the continuation exactly once.
    saved = dict(ctx.captures)
    committed: list[int] = []

    def commit(p: int) -> bool:
        committed.append(p)
        return True

    if rep_greedy(0, pos, commit):
        if k(committed[0]):
            return True
    ctx.captures.clear()
    ctx.captures.update(saved)
    return False


def _match_group(node: Group, pos: int, ctx: _Ctx, k: _Cont) -> bool:
    if node.kind != "named":
        return _match_seq(node.body, 0, pos, ctx, k)
    name = node.name
    assert name is not None

    def bind(p: int) -> bool:
        old = ctx.captures.get(name)
        ctx.captures[name] = (pos, p)
        if k(p):
            return True
        if old is None:
            del ctx.captures[name]
        else:
            ctx.captures[name] = old
        return False

    return _match_seq(node.body, 0, pos, ctx, bind)


def _match_lookahead(node: Lookahead, pos: int, ctx: _Ctx, k: _Cont) -> bool:
    saved = dict(ctx.captures)
    if node.positive:
        # Atomic: the first body match is locked in; captures it made persist.
        if not _match_seq(node.body, 0, pos, ctx, lambda p: True):
            return False
        if k(pos):
            return True
        ctx.captures.clear()
        ctx.captures.update(saved)
        return False
    matched = _match_seq(node.body, 0, pos, ctx, lambda p: True)
    ctx.captures.clear()
    ctx.captures.update(saved)
    return not matched and k(pos)


# ---------------------------------------------------------------------------
# Public entry points
# ---------------------------------------------------------------------------


def _result(ctx: _Ctx, start: int, end: int) -> MatchResult:
    captures = {name: ctx.text[s:e] for name, (s, e) in ctx.captures.items()}
    return MatchResult(True, (start, end), captures)


def _with_recursion_headroom(fn):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20_000))
    try:
        return fn()
    finally:
        sys.setrecursionlimit(old)


def reference_match(
    ast: RegexAst, text: str, *, step_budget: int = DEFAULT_STEP_BUDGET
) -> MatchResult:
    """Find the leftmost-first match of the pattern anywhere in ``text``."""

    def run() -> MatchResult:
        ctx = _Ctx(text, step_budget)
        for start in range(len(text) + 1):
            ctx.captures = {}
            found: list[int] = []

            def accept(p: int) -> bool:
                found.append(p)
                return True

            try:
                if _match_seq(ast.nodes, 0, start, ctx, accept):
                    return _result(ctx, start, found[0])
            except RecursionError:
                raise StepLimitExceeded("recursion depth exceeded") from None
        return MatchResult(False)

    return _with_recursion_headroom(run)


def reference_fullmatch(
    ast: RegexAst, text: str, *, start: int = 0, step_budget: int = DEFAULT_STEP_BUDGET
) -> MatchResult:
    """First match (in backtracking order) that consumes ``text`` to the end."""

    def run() -> MatchResult:
        ctx = _Ctx(text, step_budget)
        try:
            if _match_seq(ast.nodes, 0, start, ctx, lambda p: p == len(text)):
                return _result(ctx, start, len(text))
        except RecursionError:
            raise StepLimitExceeded("recursion depth exceeded") from None
        return MatchResult(False)

    return _with_recursion_headroom(run)
