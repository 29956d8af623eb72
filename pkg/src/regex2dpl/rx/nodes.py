"""AST node types for the supported regex subset, plus the canonical serializer.

Nodes are immutable dataclasses.  Source spans are carried for provenance but
excluded from structural equality, so a parse/serialize/parse round trip
compares equal even when escape spellings were normalized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

# Characters that must be escaped when serialized outside a character class.
_METACHARS = set(".^$*+?()[]{}|\\")

# Characters that must be escaped when serialized inside a character class.
_CLASS_METACHARS = set("]^-\\")


@dataclass(frozen=True)
class Quantifier:
    """Repetition bounds plus matching mode.

    ``max`` is None for an unbounded quantifier.  ``mode`` is one of
    ``greedy``, ``lazy`` or ``possessive``.
    """

    min: int
    max: int | None
    mode: str = "greedy"

    def is_fixed(self) -> bool:
        return self.max is not None and self.min == self.max

    def bounds_text(self) -> str:
        """Canonical source form of the bounds, without the mode suffix."""
        if self.min == 0 and self.max == 1:
            return "?"
        if self.min == 0 and self.max is None:
            return "*"
        if self.min == 1 and self.max is None:
            return "+"
        if self.max is None:
            return "{%d,}" % self.min
        if self.min == self.max:
            return "{%d}" % self.min
        return "{%d,%d}" % (self.min, self.max)

    def text(self) -> str:
        suffix = {"greedy": "", "lazy": "?", "possessive": "+"}[self.mode]
        return self.bounds_text() + suffix


@dataclass(frozen=True)
class Literal:
    """A run of one or more literal characters."""

    text: str
    span: tuple[int, int] = field(default=(-1, -1), compare=False)


@dataclass(frozen=True)
class CharRep:
    """An escape that denotes a single concrete character (\\n, \\t, \\xHH, ...).

    ``char`` is the decoded character; ``source`` the escape as written.
    """

    char: str
    source: str
    span: tuple[int, int] = field(default=(-1, -1), compare=False)


@dataclass(frozen=True)
class Dot:
    """``.`` - any character except newline."""

    span: tuple[int, int] = field(default=(-1, -1), compare=False)


@dataclass(frozen=True)
class ClassShorthand:
    """One of \\d \\D \\w \\W \\s \\S.  ``kind`` stores the escape letter."""

    kind: str
    span: tuple[int, int] = field(default=(-1, -1), compare=False)

    @property
    def negated(self) -> bool:
        return self.kind.isupper()


@dataclass(frozen=True)
class ClassChar:
    char: str


@dataclass(frozen=True)
class ClassRange:
    lo: str
    hi: str


ClassItem = Union[ClassChar, ClassRange, ClassShorthand]


@dataclass(frozen=True)
class CharClass:
    """``[...]`` or ``[^...]``."""

    items: tuple[ClassItem, ...]
    negated: bool = False
    span: tuple[int, int] = field(default=(-1, -1), compare=False)


@dataclass(frozen=True)
class Group:
    """A parenthesized group.  ``kind`` is capturing, named or noncapturing."""

    kind: str
    body: tuple["Node", ...]
    name: str | None = None
    span: tuple[int, int] = field(default=(-1, -1), compare=False)


@dataclass(frozen=True)
class Alternation:
    """Two or more branches separated by ``|``; each branch is a sequence."""

    branches: tuple[tuple["Node", ...], ...]
    span: tuple[int, int] = field(default=(-1, -1), compare=False)


@dataclass(frozen=True)
class Quantified:
    child: "Node"
    quantifier: Quantifier
    span: tuple[int, int] = field(default=(-1, -1), compare=False)


@dataclass(frozen=True)
class Anchor:
    """``^`` (kind="start") or ``$`` (kind="end")."""

    kind: str
    span: tuple[int, int] = field(default=(-1, -1), compare=False)


@dataclass(frozen=True)
class Lookahead:
    """``(?=...)`` or ``(?!...)``; the body is matched without consuming."""

    positive: bool
    body: tuple["Node", ...]
    span: tuple[int, int] = field(default=(-1, -1), compare=False)


Node = Union[
    Literal,
    CharRep,
    Dot,
    ClassShorthand,
    CharClass,
    Group,
    Alternation,
    Quantified,
    Anchor,
    Lookahead,
]


@dataclass(frozen=True)
class RegexAst:
    """A parsed pattern: the original source and the top-level node sequence."""

    source: str
    nodes: tuple[Node, ...]


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _escape_literal(text: str) -> str:
    return "".join("\\" + c if c in _METACHARS else c for c in text)


def _escape_class_char(c: str) -> str:
    return "\\" + c if c in _CLASS_METACHARS else c


def _serialize_class(node: CharClass) -> str:
    parts = ["[", "^" if node.negated else ""]
    for item in node.items:
        if isinstance(item, ClassChar):
            parts.append(_escape_class_char(item.char))
        elif isinstance(item, ClassRange):
            parts.append(_escape_class_char(item.lo) + "-" + _escape_class_char(item.hi))
        else:
            parts.append("\\" + item.kind)
    parts.append("]")
    return "".join(parts)


def _needs_group_for_quantifier(node: Node) -> bool:
    # Alternations re-serialized under a quantifier need explicit parens.
    return isinstance(node, Alternation)


def serialize_node(node: Node) -> str:
    if isinstance(node, Literal):
        return _escape_literal(node.text)
    if isinstance(node, CharRep):
        return node.source
    if isinstance(node, Dot):
        return "."
    if isinstance(node, ClassShorthand):
        return "\\" + node.kind
    if isinstance(node, CharClass):
        return _serialize_class(node)
    if isinstance(node, Group):
        inner = serialize_sequence(node.body)
        if node.kind == "named":
            return "(?<%s>%s)" % (node.name, inner)
        if node.kind == "noncapturing":
            return "(?:%s)" % inner
        return "(%s)" % inner
    if isinstance(node, Alternation):
        return "|".join(serialize_sequence(b) for b in node.branches)
    if isinstance(node, Quantified):
        child = serialize_node(node.child)
        if _needs_group_for_quantifier(node.child):
            child = "(?:%s)" % child
        return child + node.quantifier.text()
    if isinstance(node, Anchor):
        return "^" if node.kind == "start" else "$"
    if isinstance(node, Lookahead):
        return "(?%s%s)" % ("=" if node.positive else "!", serialize_sequence(node.body))
    raise TypeError("unknown node type: %r" % (node,))


def serialize_sequence(nodes: tuple[Node, ...]) -> str:
    return "".join(serialize_node(n) for n in nodes)


def serialize(ast: RegexAst) -> str:
    """Render the AST back to canonical pattern text."""
    return serialize_sequence(ast.nodes)
