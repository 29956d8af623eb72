"""Feature census: count construct usage in one pattern or a corpus.

The census answers "which features appear, how often, and how many patterns
are affected" over a fixed catalog of constructs, so rule-set owners can see
what a migration has to cover before running one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .nodes import (
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
from .normalize import normalize
from .parser import RegexSyntaxError, parse_regex

# Catalog order is fixed; reports must be byte-identical across runs.
FEATURES: tuple[tuple[str, str], ...] = (
    ("named_capturing_group", "Named capturing group"),
    ("greedy_quantifier", "Greedy quantifier"),
    ("literal_character", "Literal character"),
    ("digit_matcher", "Digit matcher"),
    ("character_representation", "Character representation"),
    ("dot_matcher", "Dot matcher"),
    ("character_class", "Character class"),
    ("space_matcher", "Space matcher"),
    ("word_matcher", "Word matcher"),
    ("negated_character_class", "Negated character class"),
    ("lazy_quantifier", "Lazy quantifier"),
    ("capturing_group", "Capturing group"),
    ("line_start", "Line start"),
    ("alternative", "Alternative"),
    ("quantified_group", "Quantified group"),
    ("non_space_matcher", "Non-space matcher"),
    ("non_capturing_group", "Non-capturing group"),
    ("non_word_matcher", "Non-word matcher"),
    ("line_end", "Line end"),
    ("optional_group", "Optional group"),
    ("non_digit_matcher", "Non-digit matcher"),
    ("positive_lookahead", "Positive lookahead"),
    ("quantified_named_capturing_group", "Quantified named capturing group"),
    ("non_word_boundary", "Non-word boundary"),
)

FEATURE_KEYS = tuple(key for key, _ in FEATURES)
_DISPLAY = dict(FEATURES)

_SHORTHAND_FEATURE = {
    "d": "digit_matcher",
    "D": "non_digit_matcher",
    "w": "word_matcher",
    "W": "non_word_matcher",
    "s": "space_matcher",
    "S": "non_space_matcher",
}


@dataclass
class FeatureCensus:
    """Per-feature occurrence counts for a single pattern.

    ``strategies`` is left empty here; converter analysis fills it with
    quantifier-strategy coverage counters when requested.
    """

    counts: dict[str, int] = field(default_factory=lambda: {k: 0 for k in FEATURE_KEYS})
    strategies: dict[str, int] = field(default_factory=dict)

    def affected(self, key: str) -> bool:
        return self.counts.get(key, 0) > 0

    def bump(self, key: str, n: int = 1) -> None:
        self.counts[key] = self.counts.get(key, 0) + n


def _walk(node: Node, out: FeatureCensus) -> None:
    if isinstance(node, Literal):
        out.bump("literal_character", len(node.text))
    elif isinstance(node, CharRep):
        out.bump("character_representation")
    elif isinstance(node, Dot):
        out.bump("dot_matcher")
    elif isinstance(node, ClassShorthand):
        out.bump(_SHORTHAND_FEATURE[node.kind])
    elif isinstance(node, CharClass):
        out.bump("negated_character_class" if node.negated else "character_class")
        for item in node.items:
            if isinstance(item, ClassShorthand):
                out.bump(_SHORTHAND_FEATURE[item.kind])
    elif isinstance(node, Group):
        key = {
            "named": "named_capturing_group",
            "capturing": "capturing_group",
            "noncapturing": "non_capturing_group",
        }[node.kind]
        out.bump(key)
        for child in node.body:
            _walk(child, out)
    elif isinstance(node, Alternation):
        out.bump("alternative", len(node.branches) - 1)
        for branch in node.branches:
            for child in branch:
                _walk(child, out)
    elif isinstance(node, Quantified):
        mode = node.quantifier.mode
        if mode == "greedy":
            out.bump("greedy_quantifier")
        elif mode == "lazy":
            out.bump("lazy_quantifier")
        child = node.child
        if isinstance(child, Group):
            if child.kind == "named":
                out.bump("quantified_named_capturing_group")
            elif node.quantifier.min == 0 and node.quantifier.max == 1 and mode == "greedy":
                out.bump("optional_group")
            else:
                out.bump("quantified_group")
        _walk(child, out)
    elif isinstance(node, Anchor):
        out.bump("line_start" if node.kind == "start" else "line_end")
    elif isinstance(node, Lookahead):
        if node.positive:
            out.bump("positive_lookahead")
        for child in node.body:
            _walk(child, out)


def census(ast: RegexAst) -> FeatureCensus:
    """Count feature occurrences in a normalized AST."""
    out = FeatureCensus()
    for node in ast.nodes:
        _walk(node, out)
    return out


# ---------------------------------------------------------------------------
# Corpus census
# ---------------------------------------------------------------------------


@dataclass
class CorpusCensus:
    analyzed: int
    totals: dict[str, int]
    affected: dict[str, int]
    skipped: list[tuple[str, str]]
    strategies: dict[str, int] = field(default_factory=dict)

    def rows(self) -> list[dict]:
        out = []
        for key in FEATURE_KEYS:
            affected = self.affected.get(key, 0)
            pct = 100.0 * affected / self.analyzed if self.analyzed else 0.0
            out.append(
                {
                    "feature": _DISPLAY[key],
                    "total": self.totals.get(key, 0),
                    "affected": affected,
                    "affected_pct": round(pct, 1),
                }
            )
        return out

    def to_json(self) -> str:
        return json.dumps(self.rows(), indent=2)

    def to_text(self) -> str:
        rows = self.rows()
        name_w = max(len(r["feature"]) for r in rows)
        lines = ["%-*s  %8s  %8s  %6s" % (name_w, "Feature", "Total", "Regexes", "Pct")]
        for r in rows:
            lines.append(
                "%-*s  %8d  %8d  %5.1f%%"
                % (name_w, r["feature"], r["total"], r["affected"], r["affected_pct"])
            )
        return "\n".join(lines)


def census_corpus(patterns: list[str], *, dedupe: bool = True) -> CorpusCensus:
    """Census over many patterns; exact duplicate lines are counted once.

    Patterns that fail to parse are reported in ``skipped`` rather than
    aborting the run.  A parse failure caused by ``\\B`` still counts toward
    the non-word-boundary row, since presence of the feature is exactly what
    the census is for.
    """
    seen: set[str] = set()
    totals = {k: 0 for k in FEATURE_KEYS}
    affected = {k: 0 for k in FEATURE_KEYS}
    skipped: list[tuple[str, str]] = []
    analyzed = 0
    for raw in patterns:
        pattern = raw.strip()
        if not pattern:
            continue
        if dedupe:
            if pattern in seen:
                continue
            seen.add(pattern)
        try:
            ast = normalize(parse_regex(pattern))
        except RegexSyntaxError as exc:
            skipped.append((pattern, exc.reason))
            if "non-word boundary" in exc.reason:
                analyzed += 1
                totals["non_word_boundary"] += 1
                affected["non_word_boundary"] += 1
            continue
        analyzed += 1
        one = census(ast)
        for key in FEATURE_KEYS:
            totals[key] += one.counts[key]
            if one.counts[key]:
                affected[key] += 1
    return CorpusCensus(analyzed, totals, affected, skipped)
