"""Parser unit tests: structure, errors, serialization round trips."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regex2dpl.rx import (
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
    Quantified,
    Quantifier,
    RegexSyntaxError,
    normalize,
    parse_regex,
    serialize,
)


def nodes_of(pattern):
    return parse_regex(pattern).nodes


def test_literal_run_coalesced():
    assert nodes_of("abc") == (Literal("abc"),)


def test_quantifier_binds_last_char_only():
    nodes = nodes_of("ab*")
    assert nodes == (Literal("a"), Quantified(Literal("b"), Quantifier(0, None, "greedy")))


def test_quantifier_modes():
    assert nodes_of("a*?")[0].quantifier == Quantifier(0, None, "lazy")
    assert nodes_of("a*+")[0].quantifier == Quantifier(0, None, "possessive")
    assert nodes_of("a{2,5}")[0].quantifier == Quantifier(2, 5, "greedy")
    assert nodes_of("a{3}")[0].quantifier == Quantifier(3, 3, "greedy")
    assert nodes_of("a{2,}")[0].quantifier == Quantifier(2, None, "greedy")
    assert nodes_of("a{,4}")[0].quantifier == Quantifier(0, 4, "greedy")
    assert nodes_of("a?")[0].quantifier == Quantifier(0, 1, "greedy")


def test_brace_without_bounds_is_literal():
    assert nodes_of("a{x}") == (Literal("a{x}"),)


def test_named_group():
    nodes = nodes_of("(?<rc>\\d{3})")
    group = nodes[0]
    assert isinstance(group, Group) and group.kind == "named" and group.name == "rc"
    inner = group.body[0]
    assert isinstance(inner, Quantified)
    assert inner.child == ClassShorthand("d")


def test_group_kinds():
    assert nodes_of("(ab)")[0].kind == "capturing"
    assert nodes_of("(?:ab)")[0].kind == "noncapturing"


def test_lookahead():
    node = nodes_of("(?=abc)")[0]
    assert isinstance(node, Lookahead) and node.positive
    node = nodes_of("(?!abc)")[0]
    assert isinstance(node, Lookahead) and not node.positive


def test_alternation_and_anchors():
    node = nodes_of("^a|bc$")[0]
    assert isinstance(node, Alternation)
    assert node.branches[0] == (Anchor("start"), Literal("a"))
    assert node.branches[1] == (Literal("bc"), Anchor("end"))


def test_char_class():
    node = nodes_of("[a-z0\\d]")[0]
    assert node == CharClass((ClassRange("a", "z"), ClassChar("0"), ClassShorthand("d")))
    assert nodes_of("[^abc]")[0].negated


def test_class_edge_cases():
    assert nodes_of("[]a]")[0] == CharClass((ClassChar("]"), ClassChar("a")))
    assert nodes_of("[a-]")[0] == CharClass((ClassChar("a"), ClassChar("-")))
    assert nodes_of("[-a]")[0] == CharClass((ClassChar("-"), ClassChar("a")))


def test_char_representations():
    assert nodes_of("\\n") == (CharRep("\n", "\\n"),)
    assert nodes_of("\\x41") == (CharRep("A", "\\x41"),)
    assert nodes_of("a\\tb") == (Literal("a"), CharRep("\t", "\\t"), Literal("b"))


def test_escaped_metachars_become_literals():
    assert nodes_of("a\\.b") == (Literal("a.b"),)
    assert nodes_of("\\*\\(") == (Literal("*("),)


@pytest.mark.parametrize(
    "pattern, fragment",
    [
        ("a\\1", "backreference"),
        ("(?<=x)a", "lookbehind"),
        ("(?<!x)a", "lookbehind"),
        ("\\Bx", "non-word boundary"),
        ("\\bx", "word boundary"),
        ("(?i)abc", "mode modifier"),
        ("(?>ab)", "atomic group"),
        ("\\k<name>", "backreference"),
    ],
)
def test_unsupported_features_rejected_by_name(pattern, fragment):
    with pytest.raises(RegexSyntaxError) as err:
        parse_regex(pattern)
    assert fragment in err.value.reason


@pytest.mark.parametrize(
    "pattern",
    ["a**", "a*+?", "a{2,5}??", "(a", "a)", "[abc", "a{5,2}", "*a", "(?<a>x)(?<a>y)"],
)
def test_malformed_patterns_rejected(pattern):
    with pytest.raises(RegexSyntaxError):
        parse_regex(pattern)


def test_error_carries_position():
    with pytest.raises(RegexSyntaxError) as err:
        parse_regex("ab\\1")
    assert err.value.position == 2


def test_double_quantification_rejected():
    with pytest.raises(RegexSyntaxError) as err:
        parse_regex("a{1,3}*")
    assert "double quantification" in err.value.reason


# ---------------------------------------------------------------------------
# Round trips
# ---------------------------------------------------------------------------

ROUND_TRIP_PATTERNS = [
    "abc",
    "(?<addr>\\d{1,3}\\.\\d{1,3}\\.\\d{1,3}\\.\\d{1,3}).*\\s+(?<rc>\\d{3})",
    "^[a-z]++:",
    "\\w+\\s?[a-z]",
    "a|bc|d",
    "(?:x|y)+z?",
    "(?=abc)\\d*",
    "[^\\d]\\n\\x41{2,}",
    "(a)(?<n>b)(?:c)",
]


@pytest.mark.parametrize("pattern", ROUND_TRIP_PATTERNS)
def test_serialize_reparse_round_trip(pattern):
    ast = parse_regex(pattern)
    again = parse_regex(serialize(ast))
    assert again.nodes == ast.nodes


def test_normalize_rewrites_degenerate_classes():
    assert normalize(parse_regex("[x]")).nodes == (Literal("x"),)
    assert normalize(parse_regex("[\\d]")).nodes == (ClassShorthand("d"),)
    assert normalize(parse_regex("[^\\d]")).nodes == (ClassShorthand("D"),)
    assert normalize(parse_regex("[^\\D]")).nodes == (ClassShorthand("d"),)
    # negated single char has no shorthand form and stays put
    assert normalize(parse_regex("[^x]")).nodes == (CharClass((ClassChar("x"),), True),)


def test_normalize_idempotent():
    for pattern in ROUND_TRIP_PATTERNS + ["[x]+[^\\s]?", "a[b][\\w]"]:
        once = normalize(parse_regex(pattern))
        twice = normalize(once)
        assert once.nodes == twice.nodes


def test_normalize_merges_adjacent_literals():
    assert normalize(parse_regex("a[b]c")).nodes == (Literal("abc"),)


# ---------------------------------------------------------------------------
# Property: random simple patterns survive serialize/parse round trips
# ---------------------------------------------------------------------------

_atoms = st.sampled_from(
    ["a", "b", "\\d", "\\w", "\\s", "[a-z]", "[^ab]", ".", "\\n", "x", "\\."]
)
_quants = st.sampled_from(["", "*", "+", "?", "{2}", "{1,3}", "*?", "++", "{2,}?"])


@st.composite
def _simple_patterns(draw):
    parts = []
    for _ in range(draw(st.integers(1, 6))):
        atom = draw(_atoms)
        parts.append(atom + draw(_quants))
    body = "".join(parts)
    if draw(st.booleans()):
        body = "(%s)|c" % body
    return body


@given(_simple_patterns())
@settings(max_examples=200, deadline=None)
def test_round_trip_property(pattern):
    ast = parse_regex(pattern)
    assert parse_regex(serialize(ast)).nodes == ast.nodes
