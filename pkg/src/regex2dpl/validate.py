"""Differential validation: does the converted pattern behave like the
source regex?

Equivalence is checked empirically on generated inputs, anchored on both
sides: a positive case is a string the source regex matches in full from
position 0 (leftmost-first), and passes when the converted pattern also
consumes the whole string and every named capture equals the matching
export text.  A negative case is drawn from the complement of the regex's
full-match language and passes when the converted pattern does not fully
match either.

Negative generation needs the language as an automaton, so patterns with
lookaheads get an empty negative suite and an explicit diagnostic instead.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

from . import automata
from .convert import BEST_EFFORT, IMPOSSIBLE, REASON_DOT, SAFE, ConversionResult, UnsupportedFeature, convert
from .dpl.engine import UnsupportedMatcherError, dpl_match
from .dpl.nodes import DplPattern
from .rx.matcher import DEFAULT_STEP_BUDGET, StepLimitExceeded, reference_fullmatch, reference_match
from .rx.nodes import RegexAst
from .rx.parser import RegexSyntaxError, parse_regex

DEFAULT_CASES = 200
DEFAULT_MAX_LEN = 40


@dataclass
class CaseSuite:
    positives: list[str]
    negatives: list[str]
    seed: int
    max_len: int
    diagnostics: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "positives": self.positives,
            "negatives": self.negatives,
            "seed": self.seed,
            "max_len": self.max_len,
            "diagnostics": self.diagnostics,
        }


@dataclass
class CaseRecord:
    input: str
    kind: str  # positive | negative
    regex_outcome: str
    dpl_outcome: str
    passed: bool
    export_diffs: dict[str, tuple[str | None, str | None]] = field(default_factory=dict)
    note: str | None = None

    def to_json(self) -> dict:
        return {
            "input": self.input,
            "kind": self.kind,
            "regex_outcome": self.regex_outcome,
            "dpl_outcome": self.dpl_outcome,
            "passed": self.passed,
            "export_diffs": {k: list(v) for k, v in self.export_diffs.items()},
            "note": self.note,
        }


@dataclass
class DifferentialReport:
    passed: bool
    cases: list[CaseRecord]
    positives_total: int
    positives_passed: int
    negatives_total: int
    negatives_passed: int
    diagnostics: list[str] = field(default_factory=list)

    @property
    def failures(self) -> list[CaseRecord]:
        return [c for c in self.cases if not c.passed]

    def to_json(self, *, include_passing: bool = False) -> dict:
        cases = self.cases if include_passing else self.failures
        return {
            "passed": self.passed,
            "positives": {"total": self.positives_total, "passed": self.positives_passed},
            "negatives": {"total": self.negatives_total, "passed": self.negatives_passed},
            "failures": [c.to_json() for c in cases],
            "diagnostics": self.diagnostics,
        }

    def to_text(self) -> str:
        lines = [
            "result    %s" % ("PASS" if self.passed else "FAIL"),
            "positive  %d/%d" % (self.positives_passed, self.positives_total),
            "negative  %d/%d" % (self.negatives_passed, self.negatives_total),
        ]
        for diag in self.diagnostics:
            lines.append("note      %s" % diag)
        for case in self.failures[:20]:
            lines.append(
                "fail      %s %r: regex %s, dpl %s"
                % (case.kind, case.input, case.regex_outcome, case.dpl_outcome)
            )
        return "\n".join(lines)


def generate_suite(
    ast: RegexAst,
    n_pos: int = DEFAULT_CASES,
    n_neg: int = DEFAULT_CASES,
    seed: int = 0,
    max_len: int = DEFAULT_MAX_LEN,
    universe: str | None = None,
) -> CaseSuite:
    """Build a reproducible positive/negative suite for one regex.

    Samples are deduplicated, so a tiny language yields fewer cases than
    requested (with a diagnostic) rather than repeats.  ``universe``
    widens or narrows the character pool negatives are drawn from.
    """
    if n_pos < 1:
        raise ValueError("n_pos must be at least 1")
    diagnostics: list[str] = []

    positives = list(dict.fromkeys(automata.sample_positive(ast, n_pos, seed)))
    if len(positives) < n_pos:
        diagnostics.append(
            "only %d of %d distinct positive cases found (sparse or empty first-match language)"
            % (len(positives), n_pos)
        )

    negatives: list[str] = []
    if n_neg > 0:
        try:
            dfa = automata.compile_ast(ast, universe)
            if automata.is_empty(dfa) and not positives:
                raise automata.EmptyLanguage("the pattern matches no string at all")
            negatives = list(
                dict.fromkeys(automata.sample(automata.complement(dfa), n_neg, max_len, seed))
            )
        except automata.NonRegularFeature as exc:
            diagnostics.append("negatives unavailable: %s" % exc)
        except automata.BoundTooLarge as exc:
            diagnostics.append("negatives unavailable: %s" % exc)
        except automata.EmptyLanguage:
            if not positives:
                raise
            diagnostics.append("no negative cases exist: the pattern matches every string")
    return CaseSuite(positives, negatives, seed, max_len, diagnostics)


def _describe(matched: bool, full: bool, span) -> str:
    if not matched:
        return "no match"
    if full:
        return "full match"
    return "partial match %s" % (span,)


def _run_case(
    ast: RegexAst, pattern: DplPattern, text: str, kind: str,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> CaseRecord:
    try:
        ref = reference_match(ast, text, step_budget=step_budget)
        ref_full = bool(ref.matched and ref.span == (0, len(text)))
        if kind == "negative" and ref.matched and not ref_full:
            # anywhere-match is fine for a negative; full-match is what counts
            ref_full = reference_fullmatch(ast, text, step_budget=step_budget).matched
        regex_outcome = _describe(ref.matched, ref_full, ref.span)
        captures = ref.captures if ref_full else {}
    except StepLimitExceeded:
        return CaseRecord(text, kind, "step budget exceeded", "skipped", True,
                          note="reference matcher gave up; case not counted against the conversion")

    try:
        dm = dpl_match(pattern, text)
        dpl_full = bool(dm.matched and dm.end == len(text))
        dpl_outcome = _describe(dm.matched, dpl_full, (0, dm.end) if dm.matched else None)
        exports = {name: value.text for name, value in dm.exports.items()} if dpl_full else {}
    except UnsupportedMatcherError as exc:
        return CaseRecord(text, kind, regex_outcome, "engine error: %s" % exc, False,
                          note="pattern contains a matcher the engine refuses to run")

    if kind == "positive":
        diffs: dict[str, tuple[str | None, str | None]] = {}
        if dpl_full:
            for name in sorted(set(captures) | set(exports)):
                left, right = captures.get(name), exports.get(name)
                if left != right:
                    diffs[name] = (left, right)
        return CaseRecord(text, kind, regex_outcome, dpl_outcome, dpl_full and not diffs, diffs)
    return CaseRecord(text, kind, regex_outcome, dpl_outcome, not dpl_full)


def run_differential(
    ast: RegexAst, result: ConversionResult, suite: CaseSuite,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> DifferentialReport:
    """Execute the suite against both engines and compare."""
    if result.classification == IMPOSSIBLE or result.pattern is None:
        raise ValueError("nothing to validate: the conversion was impossible")
    cases: list[CaseRecord] = []
    for text in suite.positives:
        cases.append(_run_case(ast, result.pattern, text, "positive", step_budget))
    for text in suite.negatives:
        cases.append(_run_case(ast, result.pattern, text, "negative", step_budget))
    pos = [c for c in cases if c.kind == "positive"]
    neg = [c for c in cases if c.kind == "negative"]
    diagnostics = list(suite.diagnostics)
    if not neg:
        diagnostics.append("no negative cases were run")
    return DifferentialReport(
        passed=all(c.passed for c in cases),
        cases=cases,
        positives_total=len(pos),
        positives_passed=sum(c.passed for c in pos),
        negatives_total=len(neg),
        negatives_passed=sum(c.passed for c in neg),
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Corpus evaluation
# ---------------------------------------------------------------------------

_STRATEGY_KEYS = ("FGQ", "LGQ", "NGQ", "FLQ", "SLQ", "LLQ", "NLQ", "direct")


@dataclass
class RegexOutcome:
    pattern: str
    classification: str | None
    strategies: list[str]
    passed: bool | None  # None: not validated (impossible/unsupported/parse error)
    failures: int = 0
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern,
            "classification": self.classification,
            "strategies": self.strategies,
            "passed": self.passed,
            "failures": self.failures,
            "error": self.error,
        }


@dataclass
class CorpusReport:
    outcomes: list[RegexOutcome]
    classification: dict[str, int]
    best_effort_split: dict[str, int]
    strategies: dict[str, int]
    safe_total: int
    safe_passed: int
    errors: int

    @property
    def all_safe_pass(self) -> bool:
        return self.safe_passed == self.safe_total

    def to_json(self) -> dict:
        return {
            "total": len(self.outcomes),
            "classification": self.classification,
            "best_effort_split": self.best_effort_split,
            "strategies": self.strategies,
            "safe": {"total": self.safe_total, "passed": self.safe_passed},
            "errors": self.errors,
            "regexes": [o.to_json() for o in self.outcomes],
        }

    def to_text(self) -> str:
        total = len(self.outcomes) or 1
        lines = ["analyzed        %d" % len(self.outcomes)]
        for key in (SAFE, BEST_EFFORT, IMPOSSIBLE):
            n = self.classification.get(key, 0)
            lines.append("%-15s %d (%.1f%%)" % (key, n, 100.0 * n / total))
        lines.append("  dot runs      %d" % self.best_effort_split.get("quantified_dot", 0))
        lines.append("  other         %d" % self.best_effort_split.get("other", 0))
        lines.append("unsupported     %d" % self.errors)
        lines.append("safe passing    %d/%d" % (self.safe_passed, self.safe_total))
        parts = ["%s=%d" % (k, self.strategies.get(k, 0)) for k in _STRATEGY_KEYS]
        lines.append("strategies      " + " ".join(parts))
        return "\n".join(lines)


def _case_seed(seed: int, pattern: str) -> int:
    return (seed * 0x9E3779B1 + zlib.crc32(pattern.encode())) & 0x7FFFFFFF


def evaluate_corpus(
    patterns: list[str],
    n_pos: int = DEFAULT_CASES,
    n_neg: int = DEFAULT_CASES,
    seed: int = 0,
) -> CorpusReport:
    """Convert and differentially test every pattern in a corpus.

    Individual failures (parse errors, unsupported features, impossible
    conversions, failing cases) are recorded, never raised.
    """
    outcomes: list[RegexOutcome] = []
    classification = {SAFE: 0, BEST_EFFORT: 0, IMPOSSIBLE: 0}
    split = {"quantified_dot": 0, "other": 0}
    strategies = {k: 0 for k in _STRATEGY_KEYS}
    strategies["unconverted"] = 0
    safe_total = safe_passed = errors = 0

    for raw in patterns:
        pattern = raw.strip()
        if not pattern:
            continue
        try:
            ast = parse_regex(pattern)
        except RegexSyntaxError as exc:
            errors += 1
            outcomes.append(RegexOutcome(pattern, None, [], None, error=str(exc)))
            continue
        try:
            result = convert(ast)
        except UnsupportedFeature as exc:
            errors += 1
            outcomes.append(RegexOutcome(pattern, None, [], None, error="unsupported: %s" % exc))
            continue

        tags = []
        for note in result.fragment_notes:
            if note.strategy is not None:
                tags.append(note.strategy)
                strategies[note.strategy] = strategies.get(note.strategy, 0) + 1
            elif note.unsafe_reason is not None:
                strategies["unconverted"] += 1
        classification[result.classification] += 1

        if result.classification == IMPOSSIBLE:
            outcomes.append(RegexOutcome(pattern, IMPOSSIBLE, tags, None))
            continue
        if result.classification == BEST_EFFORT:
            reasons = {
                n.unsafe_reason for n in result.fragment_notes if n.unsafe_reason
            }
            key = "quantified_dot" if reasons == {REASON_DOT} else "other"
            split[key] += 1

        try:
            suite = generate_suite(ast, n_pos, n_neg, _case_seed(seed, pattern))
            report = run_differential(ast, result, suite)
        except automata.EmptyLanguage:
            outcomes.append(
                RegexOutcome(pattern, result.classification, tags, None,
                             error="empty language; nothing to test")
            )
            continue
        if result.classification == SAFE:
            safe_total += 1
            safe_passed += report.passed
        outcomes.append(
            RegexOutcome(
                pattern,
                result.classification,
                tags,
                report.passed,
                failures=len(report.failures),
            )
        )

    return CorpusReport(
        outcomes, classification, split, strategies, safe_total, safe_passed, errors
    )
