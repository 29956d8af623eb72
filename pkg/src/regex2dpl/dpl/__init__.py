"""Target pattern language: model, text form, syntax checks, and engine."""

from .nodes import (
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
    builtin_default_bounds,
    effective_bounds,
    pattern_from_json,
    pattern_to_json,
    serialize_pattern,
    serialize_with_spans,
)
from .parser import DplSyntaxError, parse_dpl
from .syntax import validate_syntax
from .builtins import builtin_accepts, consume_token
from .engine import DplMatchResult, ExportValue, UnsupportedMatcherError, dpl_match

__all__ = [
    "BuiltIn",
    "DplAlternation",
    "DplCharClass",
    "DplGroup",
    "DplLookahead",
    "DplMatchResult",
    "DplPattern",
    "DplQuantifier",
    "DplSyntaxError",
    "EmptyPattern",
    "ExportName",
    "ExportValue",
    "Fragment",
    "QuotedLiteral",
    "UnsupportedMatcherError",
    "builtin_accepts",
    "builtin_default_bounds",
    "consume_token",
    "dpl_match",
    "effective_bounds",
    "parse_dpl",
    "pattern_from_json",
    "pattern_to_json",
    "serialize_pattern",
    "serialize_with_spans",
    "validate_syntax",
]
