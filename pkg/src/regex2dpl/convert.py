"""Rule-based regex-to-DPL translation with quantifier safety analysis.

The target language's quantifiers are possessive, so a greedy or lazy
source quantifier can only be carried over when giving up backtracking
provably cannot change the outcome.  Each quantified node is classified
against a small set of sufficient conditions:

greedy:  FGQ  fixed count {x}: there is nothing to give back
         LGQ  no non-optional successor remains: nothing afterwards ever
              needs the characters a maximal run consumed
         NGQ  the first characters every later matcher can consume are
              disjoint from the run's own characters, so a maximal run
              stops exactly where a backtracking run would
lazy:    FLQ  fixed count
         SLQ  lazily-quantified dot directly before the final matcher:
              the target's line-data scan has exactly those semantics
         LLQ  at the pattern end (rewrite to the minimum count) or
              directly before the end anchor (carry over as-is)
         NLQ  disjointness, as NGQ: the minimal lazy stop and the maximal
              possessive stop coincide

Everything else keeps its bounds, becomes possessive, and is flagged
best-effort for human review.  The disjointness conditions are restricted
to single-character repetition units; wider units can realign against
their successor mid-string, which breaks the argument (for example
``(ab)+`` before ``abc``), and repetition over groups uses the serialized
repetition-group form instead, which the engine deliberately refuses to
execute.

The successor scan that feeds LGQ/NGQ/NLQ walks the nodes after the
quantifier (bubbling out of enclosing groups and alternation branches):
optional single-character matchers are stepped over entirely, other
nullable matchers contribute their first-characters and the scan
continues, and the first non-nullable matcher contributes and stops it.
Skipping optional single-character matchers is sound because any early
stop that hands one of the run's own characters to such a matcher can be
rewritten as one more run repetition with the optional matcher absent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import automata
from .dpl.nodes import (
    BuiltIn,
    DplAlternation,
    DplCharClass,
    DplGroup,
    DplLookahead,
    DplPattern,
    DplQuantifier,
    EmptyPattern,
    ExportName,
    Fragment,
    QuotedLiteral,
    serialize_with_spans,
)
from .rx.matcher import node_char_test
from .rx.nodes import (
    Alternation,
    Anchor,
    CharClass,
    CharRep,
    ClassRange,
    ClassShorthand,
    ClassChar,
    Dot,
    Group,
    Literal,
    Lookahead,
    Node,
    Quantified,
    Quantifier,
    RegexAst,
    serialize_node,
)
from .rx.normalize import normalize

SAFE = "safe"
BEST_EFFORT = "best-effort"
IMPOSSIBLE = "impossible"

REASON_OVERLAP = "quantified matcher may overlap its successor"
REASON_DOT = "dot matcher widens to a line-data scan"
REASON_NONWORD = "non-word matcher emulated without underscore"
REASON_ARRAY = "repeated group has no non-backtracking equivalent"
REASON_LAZY_OPTIONAL = "lazy optional group is tried eagerly first"
REASON_POSSESSIVE_OPTIONAL = "optional group may retry after a committed match"
REASON_ZERO_WIDTH = "quantified zero-width assertion"
REASON_CLASS_COMPLEMENT = "complemented shorthand inside class expanded over printable characters"
REASON_UNANCHORED = "unanchored source skipped with a line-data prefix"

_IMPOSSIBLE_NAMED = "quantified named capturing group"


class UnsupportedFeature(ValueError):
    """The construct has no representation in the target language."""

    def __init__(self, feature: str):
        super().__init__(feature)
        self.feature = feature


@dataclass(frozen=True)
class IntersectionQuery:
    """Provenance of one language-disjointness decision."""

    unit: str
    successor: str
    verdict: bool


@dataclass(frozen=True)
class FragmentNote:
    index: int | None  # None: the source node was dropped (LLQ omission)
    strategy: str | None
    unsafe_reason: str | None = None
    span: tuple[int, int] | None = None

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "strategy": self.strategy,
            "unsafe_reason": self.unsafe_reason,
            "span": list(self.span) if self.span else None,
        }


@dataclass
class ConversionResult:
    pattern: DplPattern | None
    classification: str
    fragment_notes: list[FragmentNote] = field(default_factory=list)
    impossible_reason: str | None = None
    queries: list[IntersectionQuery] = field(default_factory=list)

    def dpl_text(self) -> str:
        if self.pattern is None or not self.pattern.fragments:
            return ""
        return serialize_with_spans(self.pattern)[0]

    def to_json(self) -> dict:
        fragments = []
        if self.pattern is not None and self.pattern.fragments:
            _, dpl_spans = serialize_with_spans(self.pattern)
            by_index: dict[int, FragmentNote] = {}
            for note in self.fragment_notes:
                if note.index is not None and note.index not in by_index:
                    by_index[note.index] = note
            for i, frag in enumerate(self.pattern.fragments):
                note = by_index.get(i)
                fragments.append(
                    {
                        "span": list(frag.origin_span) if frag.origin_span else None,
                        "dpl_span": list(dpl_spans[i]),
                        "strategy": note.strategy if note else None,
                        "unsafe_reason": frag.unsafe_reason,
                    }
                )
        return {
            "dpl": self.dpl_text(),
            "classification": self.classification,
            "fragments": fragments,
            "notes": [n.to_json() for n in self.fragment_notes],
            "impossible_reason": self.impossible_reason,
        }


class _Impossible(Exception):
    def __init__(self, reason: str):
        self.reason = reason


# ---------------------------------------------------------------------------
# Node analysis helpers
# ---------------------------------------------------------------------------


def _is_single_char(node: Node) -> bool:
    if isinstance(node, Literal):
        return len(node.text) == 1
    return isinstance(node, (CharRep, Dot, ClassShorthand, CharClass))


def _charset(node: Node, universe: frozenset[str]) -> frozenset[str]:
    if isinstance(node, Literal):
        return frozenset(node.text[:1])
    if isinstance(node, CharRep):
        return frozenset(node.char)
    return frozenset(c for c in universe if node_char_test(node, c))


def _nullable(node: Node) -> bool:
    if isinstance(node, (Anchor, Lookahead)):
        return True
    if isinstance(node, Quantified):
        return node.quantifier.min == 0 or _nullable(node.child)
    if isinstance(node, Group):
        return _seq_nullable(node.body)
    if isinstance(node, Alternation):
        return any(_seq_nullable(b) for b in node.branches)
    if isinstance(node, Literal):
        return node.text == ""
    return False


def _seq_nullable(nodes: tuple[Node, ...]) -> bool:
    return all(_nullable(n) for n in nodes)


def _first_chars(node: Node, universe: frozenset[str]) -> frozenset[str]:
    if isinstance(node, (Literal, CharRep, Dot, ClassShorthand, CharClass)):
        return _charset(node, universe)
    if isinstance(node, Anchor):
        return frozenset()
    if isinstance(node, Lookahead):
        # constrains rather than consumes; a superset is the safe direction
        return _seq_first(node.body, universe) if node.positive else universe
    if isinstance(node, Quantified):
        return _first_chars(node.child, universe)
    if isinstance(node, Group):
        return _seq_first(node.body, universe)
    if isinstance(node, Alternation):
        out: frozenset[str] = frozenset()
        for branch in node.branches:
            out |= _seq_first(branch, universe)
        return out
    raise TypeError("unknown node: %r" % (node,))


def _seq_first(nodes: tuple[Node, ...], universe: frozenset[str]) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for n in nodes:
        out |= _first_chars(n, universe)
        if not _nullable(n):
            break
    return out


# ---------------------------------------------------------------------------
# Successor scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Succ:
    """What follows a node: its remaining siblings, then each enclosing
    sequence's remainder.  Poisoned inside repeated groups, where "what
    follows" includes the group itself."""

    chains: tuple[tuple[Node, ...], ...]
    poisoned: bool = False

    def push(self, rest: tuple[Node, ...]) -> "_Succ":
        return _Succ((rest,) + self.chains, self.poisoned)


@dataclass(frozen=True)
class _Scan:
    union: frozenset[str]
    reached_end: bool
    stop: Node | None


def _scan_successors(succ: _Succ, universe: frozenset[str]) -> _Scan:
    if succ.poisoned:
        return _Scan(universe, False, None)
    union: frozenset[str] = frozenset()
    for chain in succ.chains:
        for node in chain:
            if isinstance(node, Lookahead):
                if not node.positive:
                    return _Scan(universe, False, node)
                union |= _seq_first(node.body, universe)
                continue
            if isinstance(node, Anchor):
                # nothing consumable can follow an end anchor on a viable path
                return _Scan(union, False, node)
            if (
                isinstance(node, Quantified)
                and node.quantifier.min == 0
                and _is_single_char(node.child)
            ):
                continue  # provably transparent to the disjointness argument
            if _nullable(node):
                union |= _first_chars(node, universe)
                continue
            return _Scan(union | _first_chars(node, universe), False, node)
    return _Scan(union, True, None)


def _next_nodes(succ: _Succ) -> list[Node]:
    out = []
    for chain in succ.chains:
        out.extend(chain)
    return out


# ---------------------------------------------------------------------------
# Quantifier strategy classification
# ---------------------------------------------------------------------------


def _quantifier_for(q: Quantifier) -> DplQuantifier:
    if q.min == 0 and q.max is None:
        return DplQuantifier("star")
    if q.min == 1 and q.max is None:
        return DplQuantifier("plus")
    return DplQuantifier("range", q.min, q.max)


def _record_disjointness(ctx: "_Ctx", child: Node, scan: _Scan) -> bool:
    """Charset disjointness plus the language-level double check."""
    unit_set = _charset(child, ctx.universe)
    disjoint = not (unit_set & scan.union)
    if scan.union:
        class_node = _class_for_chars(scan.union)
        verdict = automata.intersects(
            ctx.compile_unit(child), ctx.compile_unit(class_node)
        )
        ctx.queries.append(
            IntersectionQuery(serialize_node(child), serialize_node(class_node), verdict)
        )
        disjoint = disjoint and not verdict
    if disjoint and scan.stop is not None and not isinstance(scan.stop, (Anchor, Lookahead)):
        # bounded version of the repeated-language formulation
        repeated = Quantified(child, Quantifier(1, 3, "greedy"))
        verdict3 = automata.intersects(
            ctx.compile_unit(repeated), ctx.compile_unit(scan.stop)
        )
        ctx.queries.append(
            IntersectionQuery(
                serialize_node(repeated), serialize_node(scan.stop), verdict3
            )
        )
        if verdict3:
            return False
    return disjoint


def _class_for_chars(chars: frozenset[str]) -> CharClass:
    items = tuple(ClassChar(c) for c in sorted(chars))
    return CharClass(items=items, negated=False)


def classify_greedy(node: Quantified, succ: _Succ, ctx: "_Ctx") -> str | None:
    q = node.quantifier
    if not _is_single_char(node.child):
        return None
    if q.max is not None and q.min == q.max:
        return "FGQ"
    if isinstance(node.child, Dot):
        # a trailing line-data run keeps its minimum, not its maximum, so
        # "last" is not good enough for dots; disjointness still is
        scan = _scan_successors(succ, ctx.universe)
        if not scan.reached_end and _record_disjointness(ctx, node.child, scan):
            return "NGQ"
        return None
    scan = _scan_successors(succ, ctx.universe)
    if not _record_disjointness(ctx, node.child, scan):
        return None
    if scan.reached_end:
        return "LGQ"
    return "NGQ"


def classify_lazy(node: Quantified, succ: _Succ, ctx: "_Ctx") -> str | None:
    q = node.quantifier
    if not _is_single_char(node.child):
        return None
    if q.max is not None and q.min == q.max:
        return "FLQ"
    following = _next_nodes(succ)
    if (
        isinstance(node.child, Dot)
        and succ.chains
        and len(succ.chains[0]) == 1
        and all(not rest for rest in succ.chains[1:])
        and _is_slq_successor(succ.chains[0][0])
    ):
        return "SLQ"  # the committed scan and the lazy stop coincide
    if not succ.poisoned and not following:
        return "LLQ"  # pattern end: rewrite to the minimum
    if (
        not succ.poisoned
        and len(following) == 1
        and isinstance(following[0], Anchor)
        and following[0].kind == "end"
    ):
        return "LLQ"  # before the end anchor: carry bounds over as-is
    scan = _scan_successors(succ, ctx.universe)
    if not scan.reached_end and _record_disjointness(ctx, node.child, scan):
        return "NLQ"
    return None


def _is_slq_successor(node: Node) -> bool:
    return isinstance(node, (Literal, CharRep)) or (
        isinstance(node, (CharClass, ClassShorthand))
    )


# ---------------------------------------------------------------------------
# Conversion walk
# ---------------------------------------------------------------------------


class _Ctx:
    def __init__(self, ast: RegexAst):
        chars = set(automata.DEFAULT_UNIVERSE)
        _mentioned_chars(ast.nodes, chars)
        self.universe = frozenset(chars)
        self.queries: list[IntersectionQuery] = []
        self.tags: list[tuple[str | None, str | None, tuple[int, int] | None]] = []
        self._unit_cache: dict[str, automata.Dfa] = {}

    def compile_unit(self, node: Node) -> automata.Dfa:
        key = serialize_node(node)
        if key not in self._unit_cache:
            self._unit_cache[key] = automata.compile_ast(
                RegexAst(key, (node,)), "".join(sorted(self.universe))
            )
        return self._unit_cache[key]

    def tag(self, strategy: str | None, reason: str | None, span: tuple[int, int] | None) -> None:
        self.tags.append((strategy, reason, span))


def _mentioned_chars(nodes: tuple[Node, ...], out: set[str]) -> None:
    for node in nodes:
        if isinstance(node, Literal):
            out.update(node.text)
        elif isinstance(node, CharRep):
            out.add(node.char)
        elif isinstance(node, CharClass):
            for item in node.items:
                if isinstance(item, ClassChar):
                    out.add(item.char)
                elif isinstance(item, ClassRange):
                    out.update((item.lo, item.hi))
        elif isinstance(node, Group):
            _mentioned_chars(node.body, out)
        elif isinstance(node, Alternation):
            for b in node.branches:
                _mentioned_chars(b, out)
        elif isinstance(node, Quantified):
            _mentioned_chars((node.child,), out)
        elif isinstance(node, Lookahead):
            _mentioned_chars(node.body, out)


_SHORTHAND_BUILTINS = {"d": "DIGIT", "s": "SPACE", "w": "WORD", "S": "NSPACE"}

_WORD_CLASS_ITEMS = (("a", "z"), ("A", "Z"), ("0", "9"), "_")
_NONWORD_ITEMS = (("a", "z"), ("A", "Z"), ("0", "9"))
_SPACE_ITEMS = (" ", "\t", "\n", "\r", "\f", "\v")


def _span(node: Node) -> tuple[int, int] | None:
    return node.span if node.span != (-1, -1) else None


def _convert_seq(nodes: tuple[Node, ...], succ: _Succ, ctx: _Ctx) -> list[Fragment]:
    out: list[Fragment] = []
    i = 0
    while i < len(nodes):
        node = nodes[i]
        node_succ = succ.push(nodes[i + 1 :])
        emitted, consumed = _convert_node(node, node_succ, ctx)
        out.extend(emitted)
        i += 1 + consumed
    return _merge_literals(out)


def _merge_literals(frags: list[Fragment]) -> list[Fragment]:
    out: list[Fragment] = []
    for f in frags:
        prev = out[-1] if out else None
        if (
            prev is not None
            and isinstance(f.matcher, QuotedLiteral)
            and isinstance(prev.matcher, QuotedLiteral)
            and f.quantifier is None
            and prev.quantifier is None
            and f.export is None
            and prev.export is None
            and f.unsafe_reason is None
            and prev.unsafe_reason is None
        ):
            span = None
            if prev.origin_span and f.origin_span:
                span = (prev.origin_span[0], f.origin_span[1])
            out[-1] = Fragment(
                QuotedLiteral(prev.matcher.text + f.matcher.text), origin_span=span
            )
            continue
        out.append(f)
    return out


def _convert_node(node: Node, succ: _Succ, ctx: _Ctx) -> tuple[list[Fragment], int]:
    """Returns emitted fragments and how many following siblings were
    consumed by the rule (only SLQ takes its successor with it)."""
    span = _span(node)

    if isinstance(node, Literal):
        return [Fragment(QuotedLiteral(node.text), origin_span=span)], 0

    if isinstance(node, CharRep):
        if node.char == "\n":
            return [Fragment(BuiltIn("LF"), origin_span=span)], 0
        return [Fragment(QuotedLiteral(node.char), origin_span=span)], 0

    if isinstance(node, Dot):
        ctx.tag(None, REASON_DOT, span)
        return [Fragment(BuiltIn("LD"), unsafe_reason=REASON_DOT, origin_span=span)], 0

    if isinstance(node, ClassShorthand):
        return [_shorthand_fragment(node, DplQuantifier("range", 1, 1), span, ctx)], 0

    if isinstance(node, CharClass):
        matcher, reason = _convert_class(node)
        if reason:
            ctx.tag(None, reason, span)
        return [Fragment(matcher, unsafe_reason=reason, origin_span=span)], 0

    if isinstance(node, Anchor):
        kind = "BOS" if node.kind == "start" else "EOS"
        return [Fragment(BuiltIn(kind), origin_span=span)], 0

    if isinstance(node, Lookahead):
        if not node.positive:
            raise UnsupportedFeature("negative lookahead")
        # both engines treat the body atomically: its first parse is final,
        # and nothing after the body constrains it, so an empty successor
        # context gives the right strategy verdicts inside
        body = _convert_seq(node.body, _Succ(()), ctx)
        if not body:
            return [], 0  # assertion reduced to nothing always holds
        return [Fragment(DplLookahead(tuple(body)), origin_span=span)], 0

    if isinstance(node, Group):
        frag = _convert_group(node, None, succ, ctx)
        return ([frag] if frag is not None else []), 0

    if isinstance(node, Alternation):
        branches = tuple(
            tuple(_convert_seq(branch, succ, ctx)) for branch in node.branches
        )
        return [Fragment(DplAlternation(branches), origin_span=span)], 0

    if isinstance(node, Quantified):
        return _convert_quantified(node, succ, ctx)

    raise TypeError("unknown node: %r" % (node,))


def _shorthand_fragment(
    node: ClassShorthand, q: DplQuantifier | None, span, ctx: _Ctx, reason: str | None = None
) -> Fragment:
    kind = _SHORTHAND_BUILTINS.get(node.kind)
    if kind is not None:
        return Fragment(BuiltIn(kind), q, unsafe_reason=reason, origin_span=span)
    if node.kind == "D":
        matcher = DplCharClass((("0", "9"),), negated=True)
    else:  # W: drops the underscore, which the listed emulation accepts
        matcher = DplCharClass(_NONWORD_ITEMS, negated=True)
        reason = _join_reasons(reason, REASON_NONWORD)
        ctx.tag(None, REASON_NONWORD, span)
    if q is not None and q.kind == "range" and (q.min, q.max) == (1, 1):
        q = None  # classes default to one application; {1} is noise
    return Fragment(matcher, q, unsafe_reason=reason, origin_span=span)


def _join_reasons(a: str | None, b: str | None) -> str | None:
    if a and b:
        return "%s; %s" % (a, b)
    return a or b


def _convert_class(node: CharClass) -> tuple[DplCharClass, str | None]:
    items: list = []
    reason = None
    for item in node.items:
        if isinstance(item, ClassChar):
            items.append(item.char)
        elif isinstance(item, ClassRange):
            items.append((item.lo, item.hi))
        else:  # shorthand inside a class is expanded to plain items
            if item.kind == "d":
                items.append(("0", "9"))
            elif item.kind == "w":
                items.extend(_WORD_CLASS_ITEMS)
            elif item.kind == "s":
                items.extend(_SPACE_ITEMS)
            else:
                # a complemented shorthand cannot be itemized; flatten the
                # whole class over printable characters instead
                return _flatten_class(node)
    deduped: list = []
    for it in items:
        if it not in deduped:
            deduped.append(it)
    return DplCharClass(tuple(deduped), node.negated), reason


def _flatten_class(node: CharClass) -> tuple[DplCharClass, str]:
    chars = [c for c in automata.DEFAULT_UNIVERSE if node_char_test(node, c)]
    items: list = []
    run_start = run_end = None
    for c in sorted(chars):
        if run_end is not None and ord(c) == ord(run_end) + 1:
            run_end = c
            continue
        if run_start is not None:
            items.append(run_start if run_start == run_end else (run_start, run_end))
        run_start = run_end = c
    if run_start is not None:
        items.append(run_start if run_start == run_end else (run_start, run_end))
    return DplCharClass(tuple(items), negated=False), REASON_CLASS_COMPLEMENT


def _has_named_export(nodes: tuple[Node, ...]) -> bool:
    for node in nodes:
        if isinstance(node, Group):
            if node.name is not None or _has_named_export(node.body):
                return True
        elif isinstance(node, Alternation):
            if any(_has_named_export(b) for b in node.branches):
                return True
        elif isinstance(node, Quantified):
            if _has_named_export((node.child,)):
                return True
        elif isinstance(node, Lookahead):
            if _has_named_export(node.body):
                return True
    return False


def _convert_group(
    node: Group, q: Quantifier | None, succ: _Succ, ctx: _Ctx
) -> Fragment | None:
    """Unquantified (or {0,1}-quantified) group conversion."""
    span = _span(node)
    body = tuple(_convert_seq(node.body, succ, ctx))

    reason = None
    quantifier = None
    if q is not None:
        quantifier = DplQuantifier("optional")
        if q.mode == "lazy":
            reason = REASON_LAZY_OPTIONAL
            ctx.tag(None, reason, span)
        elif q.mode == "possessive":
            reason = REASON_POSSESSIVE_OPTIONAL
            ctx.tag(None, reason, span)

    if not body:
        if node.name is None:
            return None  # a group that converted to nothing matches nothing extra
        reason = _join_reasons(reason, "group body vanished in translation")
        ctx.tag(None, reason, span)
        return Fragment(DplGroup(()), quantifier, ExportName(node.name), reason, span)

    if node.name is not None:
        export = ExportName(node.name)
        if len(body) == 1 and body[0].export is None and quantifier is None:
            inner = body[0]
            return Fragment(
                inner.matcher,
                inner.quantifier,
                export,
                _join_reasons(inner.unsafe_reason, reason),
                span,
            )
        return Fragment(DplGroup(body), quantifier, export, reason, span)
    return Fragment(DplGroup(body), quantifier, None, reason, span)


def _convert_quantified(node: Quantified, succ: _Succ, ctx: _Ctx) -> tuple[list[Fragment], int]:
    q = node.quantifier
    child = node.child
    span = _span(node)

    if isinstance(child, Group):
        if child.name is not None or _has_named_export(child.body):
            raise _Impossible(_IMPOSSIBLE_NAMED)
        if (q.min, q.max) == (0, 1):
            frag = _convert_group(child, q, succ, ctx)
            return ([frag] if frag is not None else []), 0
        body = tuple(_convert_seq(child.body, _Succ((), poisoned=True), ctx))
        ctx.tag(None, REASON_ARRAY, span)
        return [
            Fragment(
                DplGroup(body, array=True),
                _quantifier_for(q),
                unsafe_reason=REASON_ARRAY,
                origin_span=span,
            )
        ], 0

    if isinstance(child, (Anchor, Lookahead)):
        frags, _ = _convert_node(child, succ, ctx)
        ctx.tag(None, REASON_ZERO_WIDTH, span)
        flagged = [
            Fragment(f.matcher, f.quantifier, f.export, REASON_ZERO_WIDTH, span)
            for f in frags
        ]
        return flagged, 0

    if q.mode == "possessive":
        if isinstance(child, Dot) and q.min != q.max:
            # a line-data run consumes minimally; a possessive dot maximally
            frag = _emit_quantified_atom(child, _quantifier_for(q), span, ctx, REASON_DOT)
            ctx.tag(None, REASON_DOT, span)
            return [frag], 0
        frag = _emit_quantified_atom(child, _quantifier_for(q), span, ctx)
        ctx.tag("direct", frag.unsafe_reason, span)
        return [frag], 0

    if q.mode == "greedy":
        strategy = classify_greedy(node, succ, ctx)
        if strategy is not None:
            emitted = _emit_quantified_atom(
                child,
                DplQuantifier("range", q.min, q.min) if strategy == "FGQ" else _quantifier_for(q),
                span,
                ctx,
            )
            ctx.tag(strategy, emitted.unsafe_reason, span)
            return [emitted], 0
        reason = REASON_DOT if isinstance(child, Dot) else REASON_OVERLAP
        frag = _emit_quantified_atom(child, _quantifier_for(q), span, ctx, reason)
        ctx.tag(None, reason, span)
        return [frag], 0

    # lazy
    strategy = classify_lazy(node, succ, ctx)
    if strategy == "FLQ":
        frag = _emit_quantified_atom(child, DplQuantifier("range", q.min, q.min), span, ctx)
        ctx.tag("FLQ", frag.unsafe_reason, span)
        return [frag], 0
    if strategy == "SLQ":
        successor = _next_nodes(succ)[0]
        ld = Fragment(BuiltIn("LD"), _quantifier_for(q), origin_span=span)
        ctx.tag("SLQ", None, span)
        succ_frags, _ = _convert_node(successor, _Succ(()), ctx)
        return [ld] + succ_frags, 1
    if strategy == "LLQ":
        if _next_nodes(succ):  # directly before the end anchor: keep bounds
            frag = _emit_quantified_atom(child, _quantifier_for(q), span, ctx)
            ctx.tag("LLQ", frag.unsafe_reason, span)
            return [frag], 0
        if q.min == 0:
            ctx.tag("LLQ", None, span)  # matches nothing in first-match runs
            return [], 0
        frag = _emit_quantified_atom(child, DplQuantifier("range", q.min, q.min), span, ctx)
        ctx.tag("LLQ", frag.unsafe_reason, span)
        return [frag], 0
    if strategy == "NLQ":
        frag = _emit_quantified_atom(child, _quantifier_for(q), span, ctx)
        ctx.tag("NLQ", frag.unsafe_reason, span)
        return [frag], 0
    reason = REASON_DOT if isinstance(child, Dot) else REASON_OVERLAP
    frag = _emit_quantified_atom(child, _quantifier_for(q), span, ctx, reason)
    ctx.tag(None, reason, span)
    return [frag], 0


def _emit_quantified_atom(
    child: Node, q: DplQuantifier, span, ctx: _Ctx, reason: str | None = None
) -> Fragment:
    if isinstance(child, Literal):
        return Fragment(QuotedLiteral(child.text), q, unsafe_reason=reason, origin_span=span)
    if isinstance(child, CharRep):
        if child.char == "\n":
            return Fragment(BuiltIn("LF"), q, unsafe_reason=reason, origin_span=span)
        return Fragment(QuotedLiteral(child.char), q, unsafe_reason=reason, origin_span=span)
    if isinstance(child, Dot):
        return Fragment(BuiltIn("LD"), q, unsafe_reason=reason, origin_span=span)
    if isinstance(child, ClassShorthand):
        return _shorthand_fragment(child, q, span, ctx, reason)
    if isinstance(child, CharClass):
        matcher, class_reason = _convert_class(child)
        if class_reason:
            ctx.tag(None, class_reason, span)
        return Fragment(
            matcher, q, unsafe_reason=_join_reasons(reason, class_reason), origin_span=span
        )
    raise TypeError("not an atom: %r" % (child,))


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def convert(ast: RegexAst, *, anchor_skip: bool = False) -> ConversionResult:
    """Translate a parsed regex into the target pattern language.

    With ``anchor_skip``, sources that do not start with a begin anchor get
    a line-data prefix fragment so matching can start anywhere on the line;
    by default the translation is position-faithful and the differential
    validator compares anchored whole-string behavior on both sides.
    """
    ast = normalize(ast)
    ctx = _Ctx(ast)
    try:
        top = _convert_top(ast, ctx, anchor_skip)
    except _Impossible as imp:
        return ConversionResult(None, IMPOSSIBLE, [], imp.reason, ctx.queries)

    fragments = tuple(top)
    notes = _notes_for(fragments, ctx)
    classification = SAFE
    if any(_fragment_unsafe(f) for f in fragments):
        classification = BEST_EFFORT
    return ConversionResult(DplPattern(fragments), classification, notes, None, ctx.queries)


def _convert_top(ast: RegexAst, ctx: _Ctx, anchor_skip: bool) -> list[Fragment]:
    fragments = _convert_seq(ast.nodes, _Succ(()), ctx)
    if anchor_skip and not (
        ast.nodes and isinstance(ast.nodes[0], Anchor) and ast.nodes[0].kind == "start"
    ):
        # a committed scan can skip past a viable later start position, so
        # the prefix always needs review
        prefix = Fragment(
            BuiltIn("LD"), DplQuantifier("star"), unsafe_reason=REASON_UNANCHORED
        )
        fragments = [prefix] + fragments
    return fragments


def _fragment_unsafe(f: Fragment) -> bool:
    if f.unsafe_reason:
        return True
    m = f.matcher
    if isinstance(m, DplGroup):
        return any(_fragment_unsafe(inner) for inner in m.fragments)
    if isinstance(m, DplAlternation):
        return any(_fragment_unsafe(inner) for branch in m.branches for inner in branch)
    if isinstance(m, DplLookahead):
        return any(_fragment_unsafe(inner) for inner in m.body)
    return False


def _notes_for(fragments: tuple[Fragment, ...], ctx: _Ctx) -> list[FragmentNote]:
    """Map recorded strategy tags onto top-level fragment indices by span."""
    notes: list[FragmentNote] = []
    for strategy, reason, span in ctx.tags:
        index = None
        if span is not None:
            for i, f in enumerate(fragments):
                fs = f.origin_span
                if fs is not None and fs[0] <= span[0] and span[1] <= fs[1]:
                    index = i
                    break
        notes.append(FragmentNote(index, strategy, reason, span))
    # fragments nobody tagged (plain structural emissions) get a direct note
    tagged = {n.index for n in notes if n.index is not None}
    for i, f in enumerate(fragments):
        if i not in tagged:
            notes.append(FragmentNote(i, "direct", f.unsafe_reason, f.origin_span))
    notes.sort(key=lambda n: (n.index is None, n.index if n.index is not None else 0))
    return notes
