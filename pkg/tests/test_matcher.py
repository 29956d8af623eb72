"""Reference matcher tests.

The quantifier-semantics cases (greedy/lazy/possessive on realistic strings)
are the backbone oracle for the whole toolkit: every conversion decision is
ultimately judged against these behaviors.
"""

from __future__ import annotations

import pytest

from regex2dpl.rx import (
    StepLimitExceeded,
    parse_regex,
    reference_fullmatch,
    reference_match,
)


def match_text(pattern: str, text: str) -> str | None:
    m = reference_match(parse_regex(pattern), text)
    if not m.matched:
        return None
    s, e = m.span
    return text[s:e]


# ---------------------------------------------------------------------------
# Quantifier mode semantics on prose-like strings
# ---------------------------------------------------------------------------


def test_greedy_dot_takes_longest_span():
    text = 'My "room", my rules. Your "room", your rules!'
    assert match_text('".+"', text) == '"room", my rules. Your "room"'


def test_lazy_dot_takes_shortest_span():
    text = 'My "room", my rules. Your "room", your rules!'
    assert match_text('".+?"', text) == '"room"'


def test_possessive_class_keeps_what_it_consumed():
    assert match_text("^[a-z]++:", "rules: 1) no loud music. 2) no parties.") == "rules:"


def test_possessive_digits_never_release():
    assert match_text("\\d*+[0-9]", "room number 345") is None


def test_greedy_release_one_char():
    assert match_text("\\w+[a-z]", "Hello-Muehlviertel!") == "Hello"


def test_greedy_release_with_optional_between():
    assert match_text("\\w+\\s?[a-z]", "Hello-Muehlviertel!") == "Hello"


def test_lazy_expands_minimally():
    assert match_text("\\w+?[a-z]", "Hello-Lavanttal!") == "He"


def test_lazy_dot_until_literal():
    assert match_text(".+?!", "Hello! Zillertal!") == "Hello!"


def test_greedy_class_at_end():
    text = "method=POST, endpoint=https://example.com/api"
    assert match_text("method=[A-Z]*", text) == "method=POST"


def test_bounded_greedy_no_release_target():
    assert match_text("\\d{1,3}x", "789") is None
    assert match_text("\\d{1,3}x", "78x") == "78x"


def test_lazy_before_anchor_expands_to_end():
    assert match_text("\\d+?x$", "78xx") is None
    assert match_text("\\d+?x$", "78x") == "78x"


# ---------------------------------------------------------------------------
# General behavior
# ---------------------------------------------------------------------------


def test_leftmost_match_wins():
    m = reference_match(parse_regex("a+"), "bb aaa a")
    assert m.span == (3, 6)


def test_unanchored_empty_match_at_start():
    m = reference_match(parse_regex("a*"), "bbb")
    assert m.matched and m.span == (0, 0)


def test_anchors():
    assert match_text("^abc", "abcdef") == "abc"
    assert match_text("^bc", "abc") is None
    assert match_text("bc$", "abc") == "bc"
    assert match_text("ab$", "abc") is None


def test_captures():
    m = reference_match(parse_regex("(?<addr>\\d{1,3}\\.\\d{1,3})\\s+(?<rc>\\d{3})"), "10.0 404")
    assert m.captures == {"addr": "10.0", "rc": "404"}


def test_capture_in_alternation_restored():
    m = reference_match(parse_regex("(?:(?<x>a)b|ac)"), "ac")
    assert m.matched
    assert m.captures == {}


def test_lookahead_positive():
    assert match_text("(?=\\d)\\w+", "7abc") == "7abc"
    assert match_text("(?=\\d)\\w+", "abc") is None


def test_lookahead_negative():
    assert match_text("(?!\\d)\\w+", "abc7") == "abc7"
    # unanchored search skips past the rejected start position
    assert match_text("(?!\\d)\\w+", "7abc") == "abc"
    assert match_text("^(?!\\d)\\w+", "7abc") is None


def test_alternation_order_is_leftmost_first():
    m = reference_match(parse_regex("(?<g>a|ab)"), "ab")
    assert m.captures["g"] == "a"


def test_nested_quantified_group_backtracks():
    assert match_text("(a|ab)+c", "aababc") == "aababc"


def test_possessive_group_locks_first_solution():
    # Greedy finds a|ab -> "a","ab"; possessive locks "a","a" then fails on "b"+c.
    assert match_text("(?:a|ab)++c", "aabc") is None
    assert match_text("(a|ab)+c", "aabc") == "aabc"


def test_empty_repetition_fills_minimum():
    m = reference_match(parse_regex("(?:a?){2}"), "")
    assert m.matched and m.span == (0, 0)
    assert match_text("(?:a?){2}b", "ab") == "ab"


def test_fullmatch_requires_total_consumption():
    ast = parse_regex("\\d+")
    assert reference_fullmatch(ast, "123").matched
    assert not reference_fullmatch(ast, "123x").matched
    assert not reference_fullmatch(ast, "x123").matched


def test_fullmatch_explores_beyond_leftmost_first():
    # Leftmost-first for a+? on "aaa" is just "a"; fullmatch must expand.
    assert reference_fullmatch(parse_regex("a+?"), "aaa").matched


def test_step_budget_enforced():
    ast = parse_regex("(?:a+)+b")
    with pytest.raises(StepLimitExceeded):
        reference_match(ast, "a" * 40 + "c", step_budget=50_000)


def test_char_representations_match():
    assert match_text("a\\tb", "a\tb") == "a\tb"
    assert match_text("\\x41+", "zAAb") == "AA"


def test_dot_excludes_newline():
    assert match_text("a.b", "a\nb") is None
    assert match_text("a.b", "axb") == "axb"
