"""Text form -> pattern model.

Whitespace between fragments is insignificant, so ``LD+ "abc"`` and
``("ab")"c"`` both parse; the canonical serializer always emits single
spaces.  Braces are overloaded by the source language: after ``ARRAY`` they
enclose fragments, anywhere else they must be a numeric quantifier.
"""

from __future__ import annotations

from .nodes import (
    BUILTIN_KINDS,
    BuiltIn,
    DplAlternation,
    DplCharClass,
    DplGroup,
    DplLookahead,
    DplPattern,
    DplQuantifier,
    ExportName,
    Fragment,
    QuotedLiteral,
)

_CHAR_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "f": "\f", "0": "\0"}


class DplSyntaxError(ValueError):
    def __init__(self, position: int, reason: str):
        super().__init__("at position %d: %s" % (position, reason))
        self.position = position
        self.reason = reason


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def error(self, reason: str, pos: int | None = None) -> DplSyntaxError:
        return DplSyntaxError(self.i if pos is None else pos, reason)

    def peek(self) -> str:
        return self.text[self.i] if self.i < len(self.text) else ""

    def take(self) -> str:
        c = self.peek()
        self.i += 1
        return c

    def skip_ws(self) -> None:
        while self.peek() in (" ", "\t", "\n", "\r"):
            self.i += 1

    def expect(self, c: str) -> None:
        if self.peek() != c:
            raise self.error("expected %r" % c)
        self.i += 1

    # -- fragments ---------------------------------------------------------

    def parse_fragments(self, closers: tuple[str, ...]) -> list[Fragment]:
        out: list[Fragment] = []
        while True:
            self.skip_ws()
            if self.peek() == "" or self.peek() in closers:
                return out
            out.append(self.parse_fragment())

    def parse_fragment(self) -> Fragment:
        matcher = self.parse_matcher()
        self.skip_ws()
        quantifier = self.try_parse_quantifier()
        self.skip_ws()
        export = None
        if self.peek() == ":":
            self.take()
            self.skip_ws()
            export = self.parse_export()
        return Fragment(matcher, quantifier, export)

    def try_parse_quantifier(self) -> DplQuantifier | None:
        c = self.peek()
        if c == "?":
            self.take()
            return DplQuantifier("optional")
        if c == "*":
            self.take()
            return DplQuantifier("star")
        if c == "+":
            self.take()
            return DplQuantifier("plus")
        if c == "{":
            start = self.i
            self.take()
            lo = self.take_digits()
            if self.peek() == ",":
                self.take()
                hi = self.take_digits()
                self.expect("}")
                if lo is None and hi is None:
                    raise self.error("empty quantifier bounds", start)
                lo = 0 if lo is None else lo
                if hi is not None and hi < lo:
                    raise self.error("reversed quantifier bounds", start)
                return DplQuantifier("range", lo, hi)
            self.expect("}")
            if lo is None:
                raise self.error("empty quantifier bounds", start)
            return DplQuantifier("range", lo, lo)
        return None

    def take_digits(self) -> int | None:
        start = self.i
        while self.peek().isdigit():
            self.i += 1
        return int(self.text[start : self.i]) if self.i > start else None

    def parse_export(self) -> ExportName:
        c = self.peek()
        if c in ('"', "'"):
            return ExportName(self.parse_quoted(), quoted=True)
        start = self.i
        if not (c.isalpha() and c.isascii()):
            raise self.error("export name must start with a letter")
        while self.peek().isascii() and (self.peek().isalnum() or self.peek() == "_"):
            self.i += 1
        return ExportName(self.text[start : self.i], quoted=False)

    # -- matchers ----------------------------------------------------------

    def parse_matcher(self):
        c = self.peek()
        if c in ('"', "'"):
            return QuotedLiteral(self.parse_quoted())
        if c == "[":
            return self.parse_class()
        if c == "(":
            return self.parse_group()
        if c == ">":
            self.take()
            self.expect(">")
            self.skip_ws()
            body = self.parse_matcher()
            if isinstance(body, DplGroup) and not body.array:
                return DplLookahead(body.fragments)
            return DplLookahead((Fragment(body),))
        if c.isalpha() and c.isascii():
            return self.parse_name()
        if c == "":
            raise self.error("unexpected end of pattern")
        raise self.error("unexpected character %r" % c)

    def parse_quoted(self) -> str:
        quote = self.take()
        out = []
        while True:
            c = self.take()
            if c == "":
                raise self.error("unterminated quoted literal")
            if c == quote:
                return "".join(out)
            if c == "\\":
                nxt = self.take()
                if nxt == "":
                    raise self.error("unterminated escape in literal")
                out.append(_CHAR_ESCAPES.get(nxt, nxt))
            else:
                out.append(c)

    def parse_class(self) -> DplCharClass:
        start = self.i
        self.expect("[")
        negated = False
        if self.peek() == "^":
            self.take()
            negated = True
        items: list = []
        while True:
            c = self.peek()
            if c == "":
                raise self.error("unterminated character class", start)
            if c == "]" and items:
                self.take()
                break
            lo = self.parse_class_char()
            if self.peek() == "-" and self.text[self.i + 1 : self.i + 2] not in ("]", ""):
                self.take()
                hi = self.parse_class_char()
                if hi < lo:
                    raise self.error("reversed class range")
                items.append((lo, hi))
            else:
                items.append(lo)
        if not items:
            raise self.error("empty character class", start)
        return DplCharClass(tuple(items), negated)

    def parse_class_char(self) -> str:
        c = self.take()
        if c != "\\":
            return c
        nxt = self.take()
        if nxt == "":
            raise self.error("unterminated escape in class")
        if nxt in ("d", "D", "w", "W", "s", "S"):
            raise self.error("class shorthand %r not supported here" % ("\\" + nxt))
        return _CHAR_ESCAPES.get(nxt, nxt)

    def parse_group(self):
        start = self.i
        self.expect("(")
        branches = [self.parse_fragments((")", "|"))]
        while self.peek() == "|":
            self.take()
            branches.append(self.parse_fragments((")", "|")))
        if self.peek() != ")":
            raise self.error("unterminated group", start)
        self.take()
        if any(not b for b in branches):
            raise self.error("empty group branch", start)
        if len(branches) == 1:
            return DplGroup(tuple(branches[0]))
        return DplAlternation(tuple(tuple(b) for b in branches))

    def parse_name(self):
        start = self.i
        while self.peek().isascii() and (self.peek().isalnum() or self.peek() == "_"):
            self.i += 1
        name = self.text[start : self.i]
        if name == "ARRAY":
            self.expect("{")
            body = self.parse_fragments(("}",))
            if self.peek() != "}":
                raise self.error("unterminated repetition group", start)
            self.take()
            if not body:
                raise self.error("empty repetition group", start)
            return DplGroup(tuple(body), array=True)
        kind = name.upper()
        if kind not in BUILTIN_KINDS:
            raise self.error("unknown matcher name %r" % name, start)
        spelling = name if name != kind else None
        fmt = None
        if kind == "TIMESTAMP":
            fmt = self.try_parse_format()
        return BuiltIn(kind, fmt, spelling)

    def try_parse_format(self) -> str | None:
        # a parenthesized quoted string right after TIMESTAMP is its format,
        # not a following group fragment
        save = self.i
        if self.peek() != "(":
            return None
        self.take()
        self.skip_ws()
        if self.peek() not in ('"', "'"):
            self.i = save
            return None
        fmt = self.parse_quoted()
        self.skip_ws()
        if self.peek() != ")":
            self.i = save
            return None
        self.take()
        return fmt


def parse_dpl(text: str) -> DplPattern:
    p = _Parser(text)
    fragments = p.parse_fragments(())
    if p.peek() != "":
        raise p.error("unexpected character %r" % p.peek())
    if not fragments:
        raise p.error("empty pattern", 0)
    return DplPattern(tuple(fragments))
