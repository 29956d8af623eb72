"""Seeded synthetic regex corpus for conversion and congruence testing.

The generator assembles log-parsing-shaped patterns from a fixed catalog
of building blocks: literal tokens, separators, character runs, named
value captures, optional parts, alternations, anchors, and the occasional
construct that is deliberately hard or impossible to convert.  Output is
fully determined by the seed, so a corpus can be committed and
regenerated byte-identically.
"""

from __future__ import annotations

import random

from .rx.parser import RegexSyntaxError, parse_regex

_WORDS = (
    "GET", "POST", "PUT", "DELETE", "INFO", "WARN", "ERROR", "DEBUG",
    "user", "host", "level", "status", "session", "request", "bytes",
    "login", "failed", "accepted", "closed", "timeout", "retry", "cache",
)

_NAMES = (
    "addr", "rc", "port", "size", "ts", "user", "level", "host", "pid",
    "code", "path", "duration", "id", "msg",
)

_SEPARATORS = ('=', ':', '/', '-', ',', ';', '#', '@', '>', '"', "'")

# value-shaped atoms: things a capture usually wraps
_VALUES = (
    "\\d+", "\\d{1,3}", "\\d{2}", "\\d{3}", "\\d{2,4}", "[0-9a-f]+",
    "\\w+", "[a-z]+", "[A-Z]+", "[A-Z]{2,5}", "[a-z]{3}", "\\S+",
    "[^,]+", "[-\\w]+", "\\d{1,5}",
)

# connective runs between fields
_GLUE = ("\\s+", "\\s", "\\s*", "\\s?", ": ", ", ", " ")

_QUANTIFIED = (
    "\\d*", "\\d+", "[a-z]*", "[A-Z]*", "\\w+", "\\S+", "[0-9]+",
    "\\d++", "[a-z]*+", "\\w++", "x*", "=+",
    "\\d+?", "[a-z]+?", "\\w*?", ".*?", ".+?", ".*", ".+",
    "\\d{3}?", "[a-z]{2}?", ".{2}?",
)

_EXOTIC = (
    "(?:ms|sec)", "(INFO|WARN|ERROR)", "(a|bc|d)", "(?:\\d+\\.)+",
    "(\\s\\w)*", "(GET|POST)?", "(?:re)?try", "(?=\\d)", "\\n",
    ".{2}", ".{3}", "a{0,3}", "(?:err)*",
)

# a small share of conversions should be impossible, as real rule sets have
_IMPOSSIBLE = ("(?<dup>\\w+)*", "(?<n>\\d)+", "(?<opt>[a-z]+)?")

_CURATED = (
    "(?<addr>\\d{1,3}\\.\\d{1,3}\\.\\d{1,3}\\.\\d{1,3}).*\\s+(?<rc>\\d{3})",
    "^\\[(?<level>[A-Z]+)\\]\\s+(?<msg>.*)$",
    "method=[A-Z]*",
    "\\d{1,3}x",
    "\\d+?x$",
    ".+?abc",
    "^[a-z]++:",
    "(?<rc>\\d{3})",
    "\\w+\\s?[a-z]",
    "\\d*+[0-9]",
    "(?<user>\\w+)@(?<host>[-\\w]+)",
    "port=(?<port>\\d{1,5})",
    "^(?<ts>\\d{4}-\\d{2}-\\d{2} \\d{2}:\\d{2}:\\d{2})",
    "(?<size>\\d+) bytes",
    "a|bc",
    "(ab)c",
    "(?<name>abc)",
)


def _field(rng: random.Random) -> str:
    value = rng.choice(_VALUES)
    if rng.random() < 0.6:
        return "(?<%s>%s)" % (rng.choice(_NAMES), value)
    if rng.random() < 0.3:
        return "(%s)" % value
    return value


def _piece(rng: random.Random) -> str:
    roll = rng.random()
    if roll < 0.28:
        return rng.choice(_WORDS)
    if roll < 0.40:
        return rng.choice(_SEPARATORS)
    if roll < 0.62:
        return _field(rng)
    if roll < 0.78:
        return rng.choice(_GLUE)
    if roll < 0.92:
        return rng.choice(_QUANTIFIED)
    return rng.choice(_EXOTIC)


def _candidate(rng: random.Random) -> str:
    n = rng.randint(2, 7)
    parts = [_piece(rng) for _ in range(n)]
    if rng.random() < 0.18:
        parts.insert(0, "^")
    if rng.random() < 0.18:
        parts.append("$")
    if rng.random() < 0.04:
        parts.append(rng.choice(_IMPOSSIBLE))
    return "".join(parts)


def generate_corpus(count: int = 220, seed: int = 17) -> list[str]:
    """Deterministically generate ``count`` distinct parseable patterns."""
    rng = random.Random(seed)
    out: list[str] = list(_CURATED)[: count]
    seen = set(out)
    while len(out) < count:
        pattern = _candidate(rng)
        # line-oriented storage cannot carry edge whitespace faithfully
        if pattern in seen or pattern != pattern.strip():
            continue
        try:
            parse_regex(pattern)
        except RegexSyntaxError:
            continue
        seen.add(pattern)
        out.append(pattern)
    return out
