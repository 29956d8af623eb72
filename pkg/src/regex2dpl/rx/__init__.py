"""Regex frontend: parsing, normalization, feature census, reference matcher."""

from .census import CorpusCensus, FeatureCensus, census, census_corpus
from .matcher import (
    DEFAULT_STEP_BUDGET,
    MatchResult,
    StepLimitExceeded,
    reference_fullmatch,
    reference_match,
)
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
    Quantifier,
    RegexAst,
    serialize,
)
from .normalize import normalize
from .parser import RegexSyntaxError, parse_regex

__all__ = [
    "Alternation",
    "Anchor",
    "CharClass",
    "CharRep",
    "ClassChar",
    "ClassRange",
    "ClassShorthand",
    "CorpusCensus",
    "DEFAULT_STEP_BUDGET",
    "Dot",
    "FeatureCensus",
    "Group",
    "Literal",
    "Lookahead",
    "MatchResult",
    "Node",
    "Quantified",
    "Quantifier",
    "RegexAst",
    "RegexSyntaxError",
    "StepLimitExceeded",
    "census",
    "census_corpus",
    "normalize",
    "parse_regex",
    "reference_fullmatch",
    "reference_match",
    "serialize",
]
