"""Finite-automata toolkit over a configurable character universe.

Patterns compile to total-transition DFAs whose edges are labeled with
*character classes*: the minimal partition of the universe induced by the
character sets the pattern mentions.  That keeps transition tables small
while staying exact.  On top of the DFA sit language queries (emptiness of
intersection, complement) and exact-uniform sampling of accepted strings,
which the differential validator uses to draw negative examples from a
pattern's complement.

Quantifier matching modes are ignored here: lazy and greedy describe the
same language, and a possessive pattern's language is a subset of its greedy
reading, which is the safe direction for complement-based sampling.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .rx.matcher import node_char_test, reference_match
from .rx.nodes import (
    Alternation,
    Anchor,
    CharClass,
    CharRep,
    ClassShorthand,
    Dot,
    Group,
    Literal,
    Lookahead,
    Node,
    Quantified,
    RegexAst,
)

DEFAULT_UNIVERSE = "\t\n\r" + "".join(chr(c) for c in range(0x20, 0x7F))

# Bounded quantifiers are expanded structurally; refuse absurd bounds.
_MAX_EXPANSION = 512


class NonRegularFeature(ValueError):
    """The AST uses a feature the DFA pipeline cannot express."""

    def __init__(self, feature: str):
        super().__init__(feature)
        self.feature = feature


class EmptyLanguage(ValueError):
    """Sampling was asked for strings from an empty language."""


class BoundTooLarge(ValueError):
    """A counted quantifier is too large for structural expansion."""


# ---------------------------------------------------------------------------
# Alphabet: minimal partition of the universe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Alphabet:
    classes: tuple[tuple[str, ...], ...]

    @staticmethod
    def from_charsets(universe: str, charsets: list[frozenset[str]]) -> "Alphabet":
        """Partition ``universe`` so every charset is a union of classes."""
        by_signature: dict[tuple[bool, ...], list[str]] = {}
        for c in sorted(set(universe)):
            sig = tuple(c in s for s in charsets)
            by_signature.setdefault(sig, []).append(c)
        classes = tuple(tuple(chars) for chars in sorted(by_signature.values()))
        return Alphabet(classes)

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @lru_cache(maxsize=None)
    def _index(self) -> dict[str, int]:
        return {c: i for i, chars in enumerate(self.classes) for c in chars}

    def class_of(self, c: str) -> int | None:
        return self._index().get(c)

    def universe(self) -> str:
        return "".join("".join(chars) for chars in self.classes)


def _merge_alphabets(a: Alphabet, b: Alphabet) -> Alphabet:
    universe = sorted(set(a.universe()) | set(b.universe()))
    by_signature: dict[tuple, list[str]] = {}
    for c in universe:
        sig = (a.class_of(c), b.class_of(c))
        by_signature.setdefault(sig, []).append(c)
    return Alphabet(tuple(tuple(chars) for chars in sorted(by_signature.values())))


# ---------------------------------------------------------------------------
# DFA
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Dfa:
    alphabet: Alphabet
    n_states: int
    start: int
    accepting: frozenset[int]
    transitions: tuple[tuple[int, ...], ...]  # [state][class] -> state, total

    def accepts(self, text: str) -> bool:
        state = self.start
        for c in text:
            cls = self.alphabet.class_of(c)
            if cls is None:
                return False
            state = self.transitions[state][cls]
        return state in self.accepting

    def to_dot(self) -> str:
        """GraphViz rendering for debugging; class labels show a sample char."""
        lines = ["digraph dfa {", "  rankdir=LR;"]
        for s in range(self.n_states):
            shape = "doublecircle" if s in self.accepting else "circle"
            prefix = "  start -> %d;\n" % s if s == self.start else ""
            if s == self.start:
                lines.append('  start [shape=point];')
            lines.append('%s  %d [shape=%s];' % (prefix, s, shape))
        for s in range(self.n_states):
            for cls, t in enumerate(self.transitions[s]):
                label = _class_label(self.alphabet.classes[cls])
                lines.append('  %d -> %d [label="%s"];' % (s, t, label))
        lines.append("}")
        return "\n".join(lines)


def _class_label(chars: tuple[str, ...]) -> str:
    sample = chars[0]
    shown = sample if sample.isprintable() and sample != '"' else repr(sample)[1:-1]
    return shown if len(chars) == 1 else "%s..(%d)" % (shown, len(chars))


# ---------------------------------------------------------------------------
# Compilation: AST -> NFA -> DFA
# ---------------------------------------------------------------------------


def _collect_charsets(nodes: tuple[Node, ...], universe: set[str], out: list[frozenset[str]]) -> None:
    for node in nodes:
        if isinstance(node, Literal):
            universe.update(node.text)
            for c in node.text:
                out.append(frozenset(c))
        elif isinstance(node, CharRep):
            universe.add(node.char)
            out.append(frozenset(node.char))
        elif isinstance(node, (Dot, ClassShorthand, CharClass)):
            out.append(frozenset(c for c in universe if node_char_test(node, c)))
        elif isinstance(node, Group):
            _collect_charsets(node.body, universe, out)
        elif isinstance(node, Alternation):
            for branch in node.branches:
                _collect_charsets(branch, universe, out)
        elif isinstance(node, Quantified):
            _collect_charsets((node.child,), universe, out)
        elif isinstance(node, Lookahead):
            raise NonRegularFeature("lookahead")


class _Nfa:
    def __init__(self) -> None:
        self.eps: list[set[int]] = []
        self.trans: list[dict[int, set[int]]] = []

    def new_state(self) -> int:
        self.eps.append(set())
        self.trans.append({})
        return len(self.eps) - 1

    def add_eps(self, a: int, b: int) -> None:
        self.eps[a].add(b)

    def add_class(self, a: int, cls: int, b: int) -> None:
        self.trans[a].setdefault(cls, set()).add(b)


def _node_classes(node: Node, alphabet: Alphabet) -> list[int]:
    """Class indices whose characters this single-char atom accepts."""
    out = []
    for i, chars in enumerate(alphabet.classes):
        if node_char_test(node, chars[0]):
            out.append(i)
    return out


def _build(nfa: _Nfa, node: Node, alphabet: Alphabet, start: int) -> int:
    if isinstance(node, Literal):
        cur = start
        for c in node.text:
            nxt = nfa.new_state()
            cls = alphabet.class_of(c)
            assert cls is not None
            nfa.add_class(cur, cls, nxt)
            cur = nxt
        return cur
    if isinstance(node, (CharRep, Dot, ClassShorthand, CharClass)):
        end = nfa.new_state()
        for cls in _node_classes(node, alphabet):
            nfa.add_class(start, cls, end)
        return end
    if isinstance(node, Group):
        return _build_seq(nfa, node.body, alphabet, start)
    if isinstance(node, Alternation):
        end = nfa.new_state()
        for branch in node.branches:
            branch_end = _build_seq(nfa, branch, alphabet, start)
            nfa.add_eps(branch_end, end)
        return end
    if isinstance(node, Quantified):
        return _build_quantified(nfa, node, alphabet, start)
    if isinstance(node, Anchor):
        raise NonRegularFeature("anchor not at pattern edge")
    if isinstance(node, Lookahead):
        raise NonRegularFeature("lookahead")
    raise TypeError("unknown node type: %r" % (node,))


def _build_quantified(nfa: _Nfa, node: Quantified, alphabet: Alphabet, start: int) -> int:
    q = node.quantifier
    if q.max is not None and q.max > _MAX_EXPANSION:
        raise BoundTooLarge("quantifier bound %d exceeds expansion limit" % q.max)
    cur = start
    for _ in range(q.min):
        cur = _build(nfa, node.child, alphabet, cur)
    if q.max is None:
        loop_start = nfa.new_state()
        nfa.add_eps(cur, loop_start)
        loop_end = _build(nfa, node.child, alphabet, loop_start)
        nfa.add_eps(loop_end, loop_start)
        end = nfa.new_state()
        nfa.add_eps(loop_start, end)
        return end
    end = nfa.new_state()
    nfa.add_eps(cur, end)
    for _ in range(q.max - q.min):
        cur = _build(nfa, node.child, alphabet, cur)
        nfa.add_eps(cur, end)
    return end


def _build_seq(nfa: _Nfa, nodes: tuple[Node, ...], alphabet: Alphabet, start: int) -> int:
    cur = start
    for node in nodes:
        cur = _build(nfa, node, alphabet, cur)
    return cur


def _strip_edge_anchors(nodes: tuple[Node, ...]) -> tuple[Node, ...]:
    out = list(nodes)
    while out and isinstance(out[0], Anchor) and out[0].kind == "start":
        out.pop(0)
    while out and isinstance(out[-1], Anchor) and out[-1].kind == "end":
        out.pop()
    return tuple(out)


def compile_ast(ast: RegexAst, universe: str | None = None) -> Dfa:
    """Compile the full-string language of a lookahead-free AST to a DFA.

    The universe defaults to tab, newline, carriage return and printable
    ASCII, automatically extended with any character the pattern mentions.
    """
    nodes = _strip_edge_anchors(ast.nodes)
    uni = set(universe if universe is not None else DEFAULT_UNIVERSE)
    charsets: list[frozenset[str]] = []
    _collect_charsets(nodes, uni, charsets)
    # Second pass: set-valued atoms saw only the pre-extension universe on
    # the first pass, so recollect with the final universe.
    charsets = []
    _collect_charsets(nodes, set(uni), charsets)
    alphabet = Alphabet.from_charsets("".join(sorted(uni)), charsets)

    nfa = _Nfa()
    start = nfa.new_state()
    end = _build_seq(nfa, nodes, alphabet, start)

    return _determinize(nfa, alphabet, start, {end})


def _determinize(nfa: _Nfa, alphabet: Alphabet, start: int, accepting_nfa: set[int]) -> Dfa:
    def closure(states: frozenset[int]) -> frozenset[int]:
        stack = list(states)
        seen = set(states)
        while stack:
            s = stack.pop()
            for t in nfa.eps[s]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    start_set = closure(frozenset({start}))
    index: dict[frozenset[int], int] = {start_set: 0}
    order = [start_set]
    table: list[list[int]] = []
    dead: int | None = None
    i = 0
    while i < len(order):
        current = order[i]
        row = []
        for cls in range(alphabet.n_classes):
            targets: set[int] = set()
            for s in current:
                targets.update(nfa.trans[s].get(cls, ()))
            nxt = closure(frozenset(targets))
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        table.append(row)
        i += 1

    accepting = frozenset(
        i for i, states in enumerate(order) if states & accepting_nfa
    )
    return Dfa(
        alphabet=alphabet,
        n_states=len(order),
        start=0,
        accepting=accepting,
        transitions=tuple(tuple(row) for row in table),
    )


# ---------------------------------------------------------------------------
# Language operations
# ---------------------------------------------------------------------------


def _remap(dfa: Dfa, merged: Alphabet) -> Dfa:
    """Re-express a DFA over a finer/larger alphabet, language unchanged.

    Characters outside the DFA's original universe get a dead state: the
    original language cannot contain them.
    """
    own_universe = set(dfa.alphabet.universe())
    dead = dfa.n_states
    needs_dead = False
    table = []
    for s in range(dfa.n_states):
        row = []
        for chars in merged.classes:
            rep = chars[0]
            if rep in own_universe:
                cls = dfa.alphabet.class_of(rep)
                assert cls is not None
                row.append(dfa.transitions[s][cls])
            else:
                row.append(dead)
                needs_dead = True
        table.append(row)
    n = dfa.n_states
    if needs_dead:
        table.append([dead] * merged.n_classes)
        n += 1
    return Dfa(merged, n, dfa.start, dfa.accepting, tuple(tuple(r) for r in table))


def intersects(a: Dfa, b: Dfa) -> bool:
    """Whether the two languages share any string (product BFS, early exit)."""
    merged = _merge_alphabets(a.alphabet, b.alphabet)
    ra, rb = _remap(a, merged), _remap(b, merged)
    seen = {(ra.start, rb.start)}
    queue = [(ra.start, rb.start)]
    while queue:
        sa, sb = queue.pop()
        if sa in ra.accepting and sb in rb.accepting:
            return True
        for cls in range(merged.n_classes):
            pair = (ra.transitions[sa][cls], rb.transitions[sb][cls])
            if pair not in seen:
                seen.add(pair)
                queue.append(pair)
    return False


def complement(dfa: Dfa) -> Dfa:
    """Strings over the same universe the DFA rejects.  An involution."""
    return Dfa(
        dfa.alphabet,
        dfa.n_states,
        dfa.start,
        frozenset(range(dfa.n_states)) - dfa.accepting,
        dfa.transitions,
    )


def is_empty(dfa: Dfa) -> bool:
    seen = {dfa.start}
    queue = [dfa.start]
    while queue:
        s = queue.pop()
        if s in dfa.accepting:
            return False
        for t in dfa.transitions[s]:
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return True


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def sample(dfa: Dfa, count: int, max_len: int, seed: int) -> list[str]:
    """Draw ``count`` strings uniformly from the language cut at ``max_len``.

    Uses exact counting of accepted strings per length (weighted by class
    sizes), so every accepted string of length <= max_len is equally likely.
    Deterministic for a given seed.  Raises EmptyLanguage when no string of
    the allowed length is accepted.
    """
    sizes = [len(chars) for chars in dfa.alphabet.classes]
    counts: list[list[int]] = [[1 if s in dfa.accepting else 0 for s in range(dfa.n_states)]]
    for _ in range(max_len):
        prev = counts[-1]
        counts.append(
            [
                sum(sizes[cls] * prev[dfa.transitions[s][cls]] for cls in range(dfa.alphabet.n_classes))
                for s in range(dfa.n_states)
            ]
        )
    per_length = [counts[l][dfa.start] for l in range(max_len + 1)]
    total = sum(per_length)
    if total == 0:
        raise EmptyLanguage("no accepted strings up to length %d" % max_len)

    rng = random.Random(seed)
    out = []
    for _ in range(count):
        r = rng.randrange(total)
        length = 0
        while r >= per_length[length]:
            r -= per_length[length]
            length += 1
        chars = []
        state = dfa.start
        for remaining in range(length, 0, -1):
            for cls in range(dfa.alphabet.n_classes):
                nxt = dfa.transitions[state][cls]
                weight = sizes[cls] * counts[remaining - 1][nxt]
                if r < weight:
                    chars.append(dfa.alphabet.classes[cls][r // counts[remaining - 1][nxt]])
                    r %= counts[remaining - 1][nxt]
                    state = nxt
                    break
                r -= weight
        out.append("".join(chars))
    return out


def sample_positive(
    ast: RegexAst, count: int, seed: int, *, max_reps: int = 8, max_attempts_factor: int = 40
) -> list[str]:
    """Generate strings by random AST walk, keeping only faithful matches.

    A kept string is one the reference matcher consumes *entirely* from
    offset 0 on its leftmost-first match, so the sample reflects what the
    pattern actually extracts, not just language membership (a lazy
    quantifier, for instance, only keeps minimal-repetition walks).  May
    return fewer than ``count`` strings if the pattern is uncooperative;
    callers should treat a short result as a diagnostic.
    """
    rng = random.Random(seed)
    out: list[str] = []
    attempts = 0
    limit = max(count * max_attempts_factor, 50)
    while len(out) < count and attempts < limit:
        attempts += 1
        try:
            s = _walk_seq(ast.nodes, rng, max_reps)
        except _WalkDeadEnd:
            continue
        m = reference_match(ast, s)
        if m.matched and m.span == (0, len(s)):
            out.append(s)
    return out


class _WalkDeadEnd(Exception):
    pass


def _walk_seq(nodes: tuple[Node, ...], rng: random.Random, max_reps: int) -> str:
    return "".join(_walk(n, rng, max_reps) for n in nodes)


def _walk(node: Node, rng: random.Random, max_reps: int) -> str:
    if isinstance(node, Literal):
        return node.text
    if isinstance(node, CharRep):
        return node.char
    if isinstance(node, (Dot, ClassShorthand, CharClass)):
        members = [c for c in DEFAULT_UNIVERSE if node_char_test(node, c)]
        if not members:
            raise _WalkDeadEnd()
        return rng.choice(members)
    if isinstance(node, Group):
        return _walk_seq(node.body, rng, max_reps)
    if isinstance(node, Alternation):
        return _walk_seq(rng.choice(node.branches), rng, max_reps)
    if isinstance(node, Quantified):
        q = node.quantifier
        hi = q.min + max_reps if q.max is None else min(q.max, q.min + max_reps)
        n = rng.randint(q.min, hi)
        return "".join(_walk(node.child, rng, max_reps) for _ in range(n))
    if isinstance(node, (Anchor, Lookahead)):
        return ""
    raise TypeError("unknown node type: %r" % (node,))
