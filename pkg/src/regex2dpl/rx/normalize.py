"""AST normalization: simplify degenerate character classes.

Two rewrites, applied recursively until stable (one pass suffices):

* a non-negated class with a single member collapses to that member:
  ``[x]`` becomes the literal ``x``, ``[\\d]`` becomes ``\\d``
* a negated class holding a single shorthand folds the negation into the
  shorthand: ``[^\\d]`` becomes ``\\D`` and ``[^\\D]`` becomes ``\\d``

Normalization is idempotent and preserves the matched language exactly.
"""

from __future__ import annotations

from .nodes import (
    Alternation,
    CharClass,
    ClassChar,
    ClassShorthand,
    Group,
    Literal,
    Lookahead,
    Node,
    Quantified,
    RegexAst,
    serialize_sequence,
)


def _normalize_class(node: CharClass) -> Node:
    if len(node.items) != 1:
        return node
    item = node.items[0]
    if not node.negated:
        if isinstance(item, ClassChar):
            return Literal(item.char, span=node.span)
        if isinstance(item, ClassShorthand):
            return ClassShorthand(item.kind, span=node.span)
        return node
    if isinstance(item, ClassShorthand):
        flipped = item.kind.lower() if item.kind.isupper() else item.kind.upper()
        return ClassShorthand(flipped, span=node.span)
    return node


def _normalize_node(node: Node) -> Node:
    if isinstance(node, CharClass):
        return _normalize_class(node)
    if isinstance(node, Group):
        return Group(node.kind, _normalize_seq(node.body), name=node.name, span=node.span)
    if isinstance(node, Alternation):
        return Alternation(tuple(_normalize_seq(b) for b in node.branches), span=node.span)
    if isinstance(node, Quantified):
        return Quantified(_normalize_node(node.child), node.quantifier, span=node.span)
    if isinstance(node, Lookahead):
        return Lookahead(node.positive, _normalize_seq(node.body), span=node.span)
    return node


def _normalize_seq(nodes: tuple[Node, ...]) -> tuple[Node, ...]:
    out: list[Node] = []
    for node in nodes:
        rewritten = _normalize_node(node)
        if isinstance(rewritten, Literal) and out and isinstance(out[-1], Literal):
            prev = out[-1]
            out[-1] = Literal(prev.text + rewritten.text, span=(prev.span[0], rewritten.span[1]))
        else:
            out.append(rewritten)
    return tuple(out)


def normalize(ast: RegexAst) -> RegexAst:
    nodes = _normalize_seq(ast.nodes)
    return RegexAst(serialize_sequence(nodes), nodes)
