"""Recursive-descent parser for the supported regex subset.

The subset covers the constructs found in log-parsing rule sets: literals,
escapes for single characters, the six class shorthands, character classes,
the dot, anchors, capturing/named/non-capturing groups, alternation,
lookahead, and greedy/lazy/possessive quantifiers.  Everything else that
PCRE would accept (backreferences, lookbehind, word boundaries, inline mode
modifiers, atomic groups) is rejected with an error naming the feature, so
callers can report *why* a pattern is out of scope instead of mis-parsing it.
"""

from __future__ import annotations

from .nodes import (
    Alternation,
    Anchor,
    CharClass,
    CharRep,
    ClassChar,
    ClassItem,
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
)

_SHORTHANDS = set("dDwWsS")
_CHAR_REPS = {"n": "\n", "t": "\t", "r": "\r", "f": "\f", "0": "\0"}

# Escapes that signal a feature outside the subset, with the name we report.
_UNSUPPORTED_ESCAPES = {
    "b": "word boundary",
    "B": "non-word boundary",
    "A": "string-start anchor escape",
    "z": "string-end anchor escape",
    "Z": "string-end anchor escape",
    "k": "named backreference",
    "g": "backreference",
    "p": "unicode property",
    "P": "unicode property",
    "R": "linebreak escape",
    "K": "match reset",
}


class RegexSyntaxError(ValueError):
    """Raised when the pattern is malformed or uses an unsupported feature."""

    def __init__(self, position: int, message: str):
        super().__init__("at position %d: %s" % (position, message))
        self.position = position
        self.reason = message


class _Parser:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0
        self.group_names: set[str] = set()

    # -- low-level helpers --------------------------------------------------

    def peek(self) -> str:
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def take(self) -> str:
        c = self.peek()
        self.pos += 1
        return c

    def expect(self, c: str) -> None:
        if self.peek() != c:
            raise RegexSyntaxError(self.pos, "expected %r" % c)
        self.pos += 1

    def error(self, message: str, pos: int | None = None) -> RegexSyntaxError:
        return RegexSyntaxError(self.pos if pos is None else pos, message)

    # -- grammar ------------------------------------------------------------

    def parse(self) -> tuple[Node, ...]:
        nodes = self.parse_alternation()
        if self.pos < len(self.src):
            raise self.error("unbalanced %r" % self.peek())
        return nodes

    def parse_alternation(self) -> tuple[Node, ...]:
        start = self.pos
        branches = [self.parse_sequence()]
        while self.peek() == "|":
            self.take()
            branches.append(self.parse_sequence())
        if len(branches) == 1:
            return branches[0]
        return (Alternation(tuple(branches), span=(start, self.pos)),)

    def parse_sequence(self) -> tuple[Node, ...]:
        nodes: list[Node] = []
        while self.peek() not in ("", "|", ")"):
            nodes.append(self.parse_quantified())
        return _coalesce_literals(nodes)

    def parse_quantified(self) -> Node:
        atom = self.parse_atom()
        quant = self.try_parse_quantifier()
        if quant is None:
            return atom
        if isinstance(atom, Anchor):
            raise self.error("quantifier applied to an anchor")
        node = Quantified(atom, quant, span=(atom.span[0], self.pos))
        if self.peek() in ("*", "+", "?") or (
            self.peek() == "{" and self._looks_like_bounds(self.pos)
        ):
            raise self.error("double quantification")
        return node

    def try_parse_quantifier(self) -> Quantifier | None:
        c = self.peek()
        if c == "*":
            self.take()
            lo, hi = 0, None
        elif c == "+":
            self.take()
            lo, hi = 1, None
        elif c == "?":
            self.take()
            lo, hi = 0, 1
        elif c == "{" and self._looks_like_bounds(self.pos):
            lo, hi = self.parse_bounds()
        else:
            return None
        mode = "greedy"
        if self.peek() == "?":
            self.take()
            mode = "lazy"
        elif self.peek() == "+":
            self.take()
            mode = "possessive"
        return Quantifier(lo, hi, mode)

    def _looks_like_bounds(self, at: int) -> bool:
        # "{" is a literal unless it starts {n}, {n,}, {n,m} or {,m}.
        i = at + 1
        seen_digit = False
        while i < len(self.src) and self.src[i].isdigit():
            seen_digit = True
            i += 1
        if i < len(self.src) and self.src[i] == ",":
            i += 1
            while i < len(self.src) and self.src[i].isdigit():
                seen_digit = True
                i += 1
        return seen_digit and i < len(self.src) and self.src[i] == "}"

    def parse_bounds(self) -> tuple[int, int | None]:
        start = self.pos
        self.expect("{")
        lo_digits = self._take_digits()
        if self.peek() == "}":
            self.take()
            n = int(lo_digits)
            return n, n
        self.expect(",")
        hi_digits = self._take_digits()
        self.expect("}")
        lo = int(lo_digits) if lo_digits else 0
        hi = int(hi_digits) if hi_digits else None
        if hi is not None and lo > hi:
            raise self.error("bad quantifier bounds {%s,%s}" % (lo_digits, hi_digits), start)
        return lo, hi

    def _take_digits(self) -> str:
        out = []
        while self.peek().isdigit():
            out.append(self.take())
        return "".join(out)

    def parse_atom(self) -> Node:
        start = self.pos
        c = self.peek()
        if c == "(":
            return self.parse_group()
        if c == "[":
            return self.parse_class()
        if c == ".":
            self.take()
            return Dot(span=(start, self.pos))
        if c == "^":
            self.take()
            return Anchor("start", span=(start, self.pos))
        if c == "$":
            self.take()
            return Anchor("end", span=(start, self.pos))
        if c == "\\":
            return self.parse_escape()
        if c in (")", "|"):
            raise self.error("unexpected %r" % c)
        if c in ("*", "+", "?"):
            raise self.error("quantifier %r with nothing to repeat" % c)
        self.take()
        return Literal(c, span=(start, self.pos))

    def parse_escape(self) -> Node:
        start = self.pos
        self.expect("\\")
        if not self.peek():
            raise self.error("dangling backslash", start)
        c = self.take()
        if c in _SHORTHANDS:
            return ClassShorthand(c, span=(start, self.pos))
        if c in _CHAR_REPS:
            return CharRep(_CHAR_REPS[c], "\\" + c, span=(start, self.pos))
        if c == "x":
            hexpart = self.src[self.pos : self.pos + 2]
            if len(hexpart) < 2 or not all(h in "0123456789abcdefABCDEF" for h in hexpart):
                raise self.error("bad \\x escape", start)
            self.pos += 2
            return CharRep(chr(int(hexpart, 16)), "\\x" + hexpart, span=(start, self.pos))
        if c.isdigit():
            raise self.error("unsupported feature: backreference", start)
        if c in _UNSUPPORTED_ESCAPES:
            raise self.error("unsupported feature: %s" % _UNSUPPORTED_ESCAPES[c], start)
        if c.isalnum():
            raise self.error("unknown escape \\%s" % c, start)
        return Literal(c, span=(start, self.pos))

    def parse_group(self) -> Node:
        start = self.pos
        self.expect("(")
        kind = "capturing"
        name: str | None = None
        positive_lookahead: bool | None = None
        if self.peek() == "?":
            self.take()
            c = self.peek()
            if c == ":":
                self.take()
                kind = "noncapturing"
            elif c == "=":
                self.take()
                positive_lookahead = True
            elif c == "!":
                self.take()
                positive_lookahead = False
            elif c == "<":
                self.take()
                if self.peek() in "=!":
                    raise self.error("unsupported feature: lookbehind", start)
                name = self._take_group_name()
                kind = "named"
            elif c == ">":
                raise self.error("unsupported feature: atomic group", start)
            else:
                raise self.error("unsupported feature: inline mode modifier", start)
        body = self.parse_alternation()
        self.expect(")")
        span = (start, self.pos)
        if positive_lookahead is not None:
            return Lookahead(positive_lookahead, body, span=span)
        if name is not None:
            if name in self.group_names:
                raise self.error("duplicate group name %r" % name, start)
            self.group_names.add(name)
        return Group(kind, body, name=name, span=span)

    def _take_group_name(self) -> str:
        start = self.pos
        out = []
        while self.peek() and (self.peek().isalnum() or self.peek() == "_"):
            out.append(self.take())
        self.expect(">")
        name = "".join(out)
        if not name or name[0].isdigit():
            raise self.error("bad group name", start)
        return name

    def parse_class(self) -> Node:
        start = self.pos
        self.expect("[")
        negated = False
        if self.peek() == "^":
            self.take()
            negated = True
        items: list[ClassItem] = []
        first = True
        while True:
            c = self.peek()
            if not c:
                raise self.error("unterminated character class", start)
            if c == "]" and not first:
                self.take()
                break
            first = False
            item = self._parse_class_member()
            if (
                isinstance(item, ClassChar)
                and self.peek() == "-"
                and self.pos + 1 < len(self.src)
                and self.src[self.pos + 1] != "]"
            ):
                self.take()
                hi = self._parse_class_member()
                if not isinstance(hi, ClassChar):
                    raise self.error("bad range endpoint in character class")
                if ord(item.char) > ord(hi.char):
                    raise self.error("reversed range in character class")
                items.append(ClassRange(item.char, hi.char))
            else:
                items.append(item)
        if not items:
            raise self.error("empty character class", start)
        return CharClass(tuple(items), negated=negated, span=(start, self.pos))

    def _parse_class_member(self) -> ClassItem:
        c = self.take()
        if c != "\\":
            return ClassChar(c)
        if not self.peek():
            raise self.error("dangling backslash in character class")
        e = self.take()
        if e in _SHORTHANDS:
            return ClassShorthand(e)
        if e in _CHAR_REPS:
            return ClassChar(_CHAR_REPS[e])
        if e == "x":
            hexpart = self.src[self.pos : self.pos + 2]
            if len(hexpart) < 2 or not all(h in "0123456789abcdefABCDEF" for h in hexpart):
                raise self.error("bad \\x escape in character class")
            self.pos += 2
            return ClassChar(chr(int(hexpart, 16)))
        if e == "b":
            return ClassChar("\x08")
        if e.isalnum():
            raise self.error("unknown escape \\%s in character class" % e)
        return ClassChar(e)


def _coalesce_literals(nodes: list[Node]) -> tuple[Node, ...]:
    """Merge adjacent single-character literals into runs."""
    out: list[Node] = []
    for node in nodes:
        if isinstance(node, Literal) and out and isinstance(out[-1], Literal):
            prev = out[-1]
            out[-1] = Literal(prev.text + node.text, span=(prev.span[0], node.span[1]))
        else:
            out.append(node)
    return tuple(out)


def parse_regex(source: str) -> RegexAst:
    """Parse pattern text into an AST.

    Raises RegexSyntaxError with a position and reason for malformed input or
    for PCRE features outside the supported subset.
    """
    return RegexAst(source, _Parser(source).parse())
