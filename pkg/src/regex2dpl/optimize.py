"""Suggesting typed high-level matchers for pattern fragments.

A converted pattern is correct but literal-minded: a quad of digit runs
stays a quad of digit runs even when it is plainly an IP address.  This
module proposes replacing such fragments with one of five typed matchers
(IPADDR, INT, LONG, DOUBLE, TIMESTAMP), leaving the accept/reject decision
to a human.

Two suggesters share the Suggestion type.  The heuristic one is
deterministic and needs two independent signals before it speaks up: the
fragment's export name must contain a keyword associated with the matcher
(table shipped as a data file, extensible), and the fragment's shape must
be compatible (digit-only for the numeric matchers, dots-and-digits for
IPADDR, free-text for TIMESTAMP).  The LLM-backed one sends a fixed
four-section prompt to a chat-completion endpoint configured through
environment variables and parses the JSON reply, dropping anything outside
the five allowed matchers.  When no endpoint is configured, callers fall
back to the heuristic.

Replacement is deliberately lossy: the typed matcher accepts a different
language than the fragment it replaces (INT rejects out-of-range digit
runs, TIMESTAMP rejects digit runs that are not dates).  Whether that
trade is right depends on the data, so the evaluation harness replays
suggestions against labeled log lines: a suggestion counts as correct only
when the edited pattern still matches every line the source regex matched
and none it rejected.  TIMESTAMP is graded by fragment identity instead,
since a format mismatch with real timestamps is considered a tolerable
near-miss.
"""

from __future__ import annotations

import json
import math
import os
import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

import requests

from .convert import IMPOSSIBLE, convert
from .dpl.engine import dpl_match
from .dpl.nodes import (
    BuiltIn,
    DplAlternation,
    DplCharClass,
    DplGroup,
    DplMatcher,
    DplPattern,
    Fragment,
    QuotedLiteral,
    serialize_with_spans,
)
from .rx.matcher import reference_match
from .rx.parser import parse_regex

HIGH_LEVEL_MATCHERS = ("IPADDR", "INT", "LONG", "DOUBLE", "TIMESTAMP")

_DATA_DIR = Path(__file__).parent / "data"
_DIGITS = frozenset("0123456789")


@dataclass(frozen=True)
class Suggestion:
    fragment_index: int
    proposed: str
    rationale: str
    source: str  # "heuristic" | "llm"

    def to_json(self) -> dict:
        return {
            "fragment": self.fragment_index,
            "matcher": self.proposed,
            "rationale": self.rationale,
            "source": self.source,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Suggestion":
        return cls(d["fragment"], d["matcher"], d.get("rationale", ""), d.get("source", "llm"))


def fragments_of(p: DplPattern) -> list[Fragment]:
    """Top-level fragments: the units suggestions are indexed against."""
    return list(p.fragments)


# ---------------------------------------------------------------------------
# Heuristic suggester
# ---------------------------------------------------------------------------


def load_keywords(path: str | Path | None = None) -> dict[str, tuple[str, ...]]:
    """Matcher -> export-name keywords, from the bundled (or given) table."""
    raw = json.loads(Path(path or _DATA_DIR / "keywords.json").read_text())
    table: dict[str, tuple[str, ...]] = {}
    for matcher, words in raw.items():
        if matcher not in HIGH_LEVEL_MATCHERS:
            raise ValueError("keyword table names unknown matcher %r" % matcher)
        table[matcher] = tuple(w.lower() for w in words)
    return table


def _iter_leaves(m: DplMatcher):
    # consuming leaves only; anchors and lookaheads shape nothing
    if isinstance(m, (QuotedLiteral, DplCharClass)):
        yield m
    elif isinstance(m, BuiltIn):
        if m.kind not in ("BOS", "EOS"):
            yield m
    elif isinstance(m, DplGroup):
        for f in m.fragments:
            yield from _iter_leaves(f.matcher)
    elif isinstance(m, DplAlternation):
        for branch in m.branches:
            for f in branch:
                yield from _iter_leaves(f.matcher)


def _class_within(m: DplCharClass, allowed: frozenset[str]) -> bool:
    if m.negated:
        return False
    for item in m.items:
        if isinstance(item, tuple):
            lo, hi = item
            if any(chr(c) not in allowed for c in range(ord(lo), ord(hi) + 1)):
                return False
        elif item not in allowed:
            return False
    return True


def _class_accepts(m: DplCharClass, c: str) -> bool:
    hit = any(
        (item[0] <= c <= item[1]) if isinstance(item, tuple) else item == c
        for item in m.items
    )
    return hit != m.negated


def _digit_leaf(leaf: DplMatcher) -> bool:
    if isinstance(leaf, QuotedLiteral):
        return bool(leaf.text) and set(leaf.text) <= _DIGITS
    if isinstance(leaf, BuiltIn):
        return leaf.kind in ("DIGIT", "INT", "LONG")
    if isinstance(leaf, DplCharClass):
        return _class_within(leaf, _DIGITS)
    return False


def _digit_shape(m: DplMatcher) -> bool:
    leaves = list(_iter_leaves(m))
    return bool(leaves) and all(_digit_leaf(leaf) for leaf in leaves)


_DOTTED = _DIGITS | {"."}


def _dotted_shape(m: DplMatcher) -> bool:
    leaves = list(_iter_leaves(m))
    if not leaves:
        return False
    has_dot = has_digit = False
    for leaf in leaves:
        if isinstance(leaf, BuiltIn):
            if leaf.kind in ("IPADDR", "IPV4"):
                has_dot = has_digit = True
            elif leaf.kind in ("DIGIT", "INT", "LONG"):
                has_digit = True
            else:
                return False
        elif isinstance(leaf, QuotedLiteral):
            if not leaf.text or not set(leaf.text) <= _DOTTED:
                return False
            has_dot = has_dot or "." in leaf.text
            has_digit = has_digit or any(c in _DIGITS for c in leaf.text)
        elif isinstance(leaf, DplCharClass):
            if not _class_within(leaf, _DOTTED):
                return False
            has_dot = has_dot or _class_accepts(leaf, ".")
            has_digit = has_digit or any(_class_accepts(leaf, d) for d in "09")
        else:
            return False
    return has_dot and has_digit


def _broad_shape(m: DplMatcher) -> bool:
    return any(
        isinstance(leaf, BuiltIn) and leaf.kind in ("LD", "DATA", "WORD", "TIMESTAMP")
        for leaf in _iter_leaves(m)
    )


_SHAPE_TESTS: dict[str, Callable[[DplMatcher], bool]] = {
    "IPADDR": _dotted_shape,
    "INT": _digit_shape,
    "LONG": _digit_shape,
    "DOUBLE": _digit_shape,
    "TIMESTAMP": _broad_shape,
}

_SHAPE_HINTS = {
    "IPADDR": "dots and digits",
    "INT": "digit-only",
    "LONG": "digit-only",
    "DOUBLE": "digit-only",
    "TIMESTAMP": "broad text",
}


def suggest_heuristic(
    p: DplPattern, keywords: Mapping[str, tuple[str, ...]] | None = None
) -> list[Suggestion]:
    """At most one suggestion per fragment, and only on double evidence:
    a keyword in the export name plus a compatible fragment shape.

    When several matchers qualify, the keyword appearing earliest in the
    export name wins (so ``ip_port`` with a digit-only shape gets INT, not
    IPADDR, which its shape rules out anyway; ``pid`` prefers INT over the
    embedded ``id``)."""
    table = keywords if keywords is not None else load_keywords()
    out: list[Suggestion] = []
    for index, frag in enumerate(p.fragments):
        if frag.export is None:
            continue
        name = frag.export.name.lower()
        candidates: list[tuple[int, int, str, str]] = []
        for order, (matcher, words) in enumerate(table.items()):
            hits = [(name.find(w), w) for w in words if w in name]
            if not hits:
                continue
            if not _SHAPE_TESTS[matcher](frag.matcher):
                continue
            pos, word = min(hits)
            candidates.append((pos, order, matcher, word))
        if not candidates:
            continue
        _, _, matcher, word = min(candidates)
        rationale = "export name %r contains %r; fragment language is %s" % (
            frag.export.name,
            word,
            _SHAPE_HINTS[matcher],
        )
        out.append(Suggestion(index, matcher, rationale, "heuristic"))
    return out


def apply_suggestion(p: DplPattern, s: Suggestion) -> DplPattern:
    """Swap one fragment for the proposed matcher, keeping its export.

    The old quantifier is dropped along with the matcher: a repetition
    count on characters means nothing on a typed token (DIGIT{3} counts
    digits, INT{3} would count whole integers).  Replacing a whole group
    drops its parentheses as a side effect of the swap; applying the same
    suggestion twice is a no-op."""
    if not 0 <= s.fragment_index < len(p.fragments):
        raise IndexError("no fragment %d in a %d-fragment pattern" % (s.fragment_index, len(p.fragments)))
    if s.proposed not in HIGH_LEVEL_MATCHERS:
        raise ValueError("not a suggestable matcher: %r" % s.proposed)
    old = p.fragments[s.fragment_index]
    new = Fragment(
        matcher=BuiltIn(s.proposed),
        export=old.export,
        origin_span=old.origin_span,
    )
    fragments = list(p.fragments)
    fragments[s.fragment_index] = new
    return DplPattern(tuple(fragments))


# ---------------------------------------------------------------------------
# LLM-backed suggester
# ---------------------------------------------------------------------------

SYSTEM_MESSAGE = (
    "You act as a backend suggesting optimizations for the DPL "
    "(Dynatrace Pattern Language) responding in plain JSON."
)


class TransportError(RuntimeError):
    """The completion endpoint could not be reached or returned an error."""


class LlmTimeout(TransportError):
    """The completion request exceeded the configured timeout."""


class SchemaError(ValueError):
    """The reply was not the expected JSON shape; raw text retained."""

    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


@dataclass(frozen=True)
class LlmConfig:
    endpoint: str
    api_key: str | None = None
    model: str = "gpt-4"
    timeout_ms: int = 30000

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None) -> "LlmConfig | None":
        env = os.environ if environ is None else environ
        endpoint = env.get("LLM_ENDPOINT")
        if not endpoint:
            return None
        return cls(
            endpoint=endpoint,
            api_key=env.get("LLM_API_KEY"),
            model=env.get("LLM_MODEL", "gpt-4"),
            timeout_ms=int(env.get("LLM_TIMEOUT_MS", "30000")),
        )


def _http_transport(url: str, headers: dict, payload: dict, timeout_s: float) -> dict:
    response = requests.post(url, json=payload, headers=headers, timeout=timeout_s)
    response.raise_for_status()
    return response.json()


class LlmClient:
    """Thin chat-completion client; every exchange is kept (key redacted)
    so a reviewer can audit exactly what was asked and answered."""

    def __init__(self, config: LlmConfig, transport=None):
        self.config = config
        self._transport = transport or _http_transport
        self.exchanges: list[dict] = []

    def complete(self, system: str, user: str) -> str:
        payload = {
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": 0,
        }
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = "Bearer " + self.config.api_key
        record = {
            "endpoint": self.config.endpoint,
            "request": payload,
            "headers": {**headers, **({"Authorization": "Bearer ***"} if self.config.api_key else {})},
        }
        try:
            reply = self._transport(
                self.config.endpoint, headers, payload, self.config.timeout_ms / 1000.0
            )
        except requests.Timeout as exc:
            raise LlmTimeout("completion request timed out: %s" % exc) from exc
        except requests.RequestException as exc:
            raise TransportError("completion request failed: %s" % exc) from exc
        record["response"] = reply
        self.exchanges.append(record)
        try:
            return reply["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise SchemaError("reply carries no message content", raw=json.dumps(reply)) from None


def build_prompt(p: DplPattern) -> str:
    text, spans = serialize_with_spans(p)
    fragments = "\n".join("%d: %s" % (i, text[a:b]) for i, (a, b) in enumerate(spans))
    template = string.Template((_DATA_DIR / "prompt_template.txt").read_text())
    return template.substitute(pattern=text, fragments=fragments)


def suggest_llm(p: DplPattern, client: LlmClient) -> tuple[list[Suggestion], list[str]]:
    """Ask the configured endpoint; invalid entries are dropped, not fatal."""
    raw = client.complete(SYSTEM_MESSAGE, build_prompt(p))
    try:
        data = json.loads(raw.strip())
    except json.JSONDecodeError:
        raise SchemaError("reply is not valid JSON", raw=raw) from None
    if not isinstance(data, list):
        raise SchemaError("reply is not a JSON array", raw=raw)

    suggestions: list[Suggestion] = []
    diagnostics: list[str] = []
    for entry in data:
        if not isinstance(entry, dict):
            diagnostics.append("dropped non-object entry %r" % (entry,))
            continue
        matcher = entry.get("matcher")
        index = entry.get("fragment")
        if matcher not in HIGH_LEVEL_MATCHERS:
            diagnostics.append("dropped suggestion with unknown matcher %r" % (matcher,))
            continue
        if not isinstance(index, int) or not 0 <= index < len(p.fragments):
            diagnostics.append("dropped suggestion with invalid fragment index %r" % (index,))
            continue
        suggestions.append(Suggestion(index, matcher, str(entry.get("rationale", "")), "llm"))
    return suggestions, diagnostics


def suggest(p: DplPattern, client: LlmClient | None = None) -> tuple[list[Suggestion], list[str]]:
    """LLM when a client is configured, deterministic heuristic otherwise."""
    if client is None:
        return suggest_heuristic(p), []
    return suggest_llm(p, client)


# ---------------------------------------------------------------------------
# Evaluation metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def to_json(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


@dataclass(frozen=True)
class MetricsReport:
    precision: float | None
    recall: float | None
    f1: float | None
    mcc: float | None

    def to_json(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1, "mcc": self.mcc}


def metrics(c: ConfusionCounts) -> MetricsReport:
    """Standard confusion-matrix metrics; a zero denominator yields an
    absent value rather than a fake zero."""
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else None
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else None
    f1 = None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    denom = (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn)
    mcc = (c.tp * c.tn - c.fp * c.fn) / math.sqrt(denom) if denom else None
    return MetricsReport(precision, recall, f1, mcc)


def average_metrics(reports: Iterable[MetricsReport]) -> MetricsReport:
    """Column-wise mean of the defined values."""
    cols: dict[str, list[float]] = {"precision": [], "recall": [], "f1": [], "mcc": []}
    for r in reports:
        for name in cols:
            value = getattr(r, name)
            if value is not None:
                cols[name].append(value)
    means = {name: (sum(vs) / len(vs) if vs else None) for name, vs in cols.items()}
    return MetricsReport(**means)


# ---------------------------------------------------------------------------
# Evaluation harness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LabeledRegex:
    source: str
    labels: dict[int, str]  # fragment index -> applicable matcher


@dataclass(frozen=True)
class TechnologyDataset:
    name: str
    regexes: tuple[LabeledRegex, ...]
    lines: tuple[str, ...]


def load_dataset(root: str | Path) -> list[TechnologyDataset]:
    """Read per-technology directories of logs.txt, regexes.txt, labels.json.

    labels.json is a list parallel to the regex lines; each element maps a
    fragment index (as a string) to a matcher name, or null for none."""
    root = Path(root)
    out: list[TechnologyDataset] = []
    for tech_dir in sorted(d for d in root.iterdir() if d.is_dir()):
        regexes = [
            line for line in (tech_dir / "regexes.txt").read_text().splitlines() if line.strip()
        ]
        lines = [line for line in (tech_dir / "logs.txt").read_text().splitlines() if line.strip()]
        raw_labels = json.loads((tech_dir / "labels.json").read_text())
        if len(raw_labels) != len(regexes):
            raise ValueError(
                "%s: %d label sets for %d regexes" % (tech_dir.name, len(raw_labels), len(regexes))
            )
        labeled = []
        for source, entry in zip(regexes, raw_labels):
            labels: dict[int, str] = {}
            for key, matcher in entry.items():
                if matcher is None:
                    continue
                if matcher not in HIGH_LEVEL_MATCHERS:
                    raise ValueError("%s: unknown matcher %r in labels" % (tech_dir.name, matcher))
                labels[int(key)] = matcher
            labeled.append(LabeledRegex(source, labels))
        out.append(TechnologyDataset(tech_dir.name, tuple(labeled), tuple(lines)))
    if not out:
        raise ValueError("no technology directories under %s" % root)
    return out


@dataclass(frozen=True)
class FragmentVerdict:
    technology: str
    pattern: str
    fragment_index: int
    fragment_text: str
    truth: str | None
    suggested: str | None
    tests_passed: bool | None  # None when nothing was suggested
    counted: str | None  # "TP" | "FP" for suggested fragments

    def to_json(self) -> dict:
        return {
            "technology": self.technology,
            "pattern": self.pattern,
            "fragment": self.fragment_index,
            "text": self.fragment_text,
            "truth": self.truth,
            "suggested": self.suggested,
            "tests_passed": self.tests_passed,
            "counted": self.counted,
        }


@dataclass
class OptimizerEvaluation:
    counts: dict[str, ConfusionCounts]
    reports: dict[str, MetricsReport]
    verdicts: list[FragmentVerdict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "matchers": {
                m: {"counts": self.counts[m].to_json(), "metrics": self.reports[m].to_json()}
                for m in HIGH_LEVEL_MATCHERS
            },
            "fragments": [v.to_json() for v in self.verdicts],
        }

    def to_text(self) -> str:
        def cell(value: float | None) -> str:
            return "-" if value is None else "%.4f" % value

        lines = ["matcher     TP   FP   FN   TN   precision  recall     f1         mcc"]
        for m in HIGH_LEVEL_MATCHERS:
            c, r = self.counts[m], self.reports[m]
            lines.append(
                "%-10s %4d %4d %4d %4d   %-10s %-10s %-10s %s"
                % (m, c.tp, c.fp, c.fn, c.tn, cell(r.precision), cell(r.recall), cell(r.f1), cell(r.mcc))
            )
        avg = average_metrics(self.reports.values())
        lines.append(
            "%-10s %21s   %-10s %-10s %-10s %s"
            % ("average", "", cell(avg.precision), cell(avg.recall), cell(avg.f1), cell(avg.mcc))
        )
        return "\n".join(lines)


def evaluate_optimizer(
    datasets: Iterable[TechnologyDataset],
    suggest_fn: Callable[[DplPattern], list[Suggestion]] | None = None,
) -> OptimizerEvaluation:
    """Replay suggestions against labeled logs, one-vs-rest per matcher.

    For every suggested fragment the pattern is re-tested with just that
    fragment swapped: it must still match each log line the source regex
    matches and reject each line it does not.  All tests passing makes the
    suggestion a TP for its matcher, except TIMESTAMP, which is a TP
    whenever the ground truth agrees the fragment holds a timestamp.
    Unsuggested fragments score FN against their ground-truth matcher and
    TN against the rest."""
    suggester = suggest_fn if suggest_fn is not None else suggest_heuristic
    verdicts: list[FragmentVerdict] = []

    for tech in datasets:
        for lreg in tech.regexes:
            ast = parse_regex(lreg.source)
            result = convert(ast)
            if result.classification == IMPOSSIBLE or result.pattern is None:
                raise ValueError("cannot evaluate %r: conversion is impossible" % lreg.source)
            base = result.pattern
            text, spans = serialize_with_spans(base)
            positives, negatives = [], []
            for line in tech.lines:
                (positives if reference_match(ast, line).matched else negatives).append(line)
            proposals = {s.fragment_index: s for s in suggester(base)}

            for index in range(len(base.fragments)):
                truth = lreg.labels.get(index)
                fragment_text = text[spans[index][0] : spans[index][1]]
                proposal = proposals.get(index)
                if proposal is None:
                    verdicts.append(
                        FragmentVerdict(tech.name, lreg.source, index, fragment_text, truth, None, None, None)
                    )
                    continue
                edited = apply_suggestion(base, proposal)
                passed = all(dpl_match(edited, line).matched for line in positives) and all(
                    not dpl_match(edited, line).matched for line in negatives
                )
                hit = passed or (proposal.proposed == "TIMESTAMP" and truth == "TIMESTAMP")
                verdicts.append(
                    FragmentVerdict(
                        tech.name,
                        lreg.source,
                        index,
                        fragment_text,
                        truth,
                        proposal.proposed,
                        passed,
                        "TP" if hit else "FP",
                    )
                )

    counts: dict[str, ConfusionCounts] = {}
    for matcher in HIGH_LEVEL_MATCHERS:
        tp = fp = fn = tn = 0
        for v in verdicts:
            if v.suggested == matcher:
                if v.counted == "TP":
                    tp += 1
                else:
                    fp += 1
            elif v.truth == matcher:
                fn += 1
            else:
                tn += 1
        counts[matcher] = ConfusionCounts(tp, fp, fn, tn)
    reports = {matcher: metrics(c) for matcher, c in counts.items()}
    return OptimizerEvaluation(counts, reports, verdicts)
