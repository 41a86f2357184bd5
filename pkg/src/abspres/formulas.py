"""Formula ASTs and the formula / transformer-expression parser.

Grammar (precedence ! > & > |, unary temporal operators bind like !):

    phi ::= ident
          | "!" phi | phi "&" phi | phi "|" phi
          | "EX" phi | "AX" phi
          | ("EU" | "AU" | "ER" | "AR") "(" phi "," phi ")"
          | "EF" "[" int "," int "]" phi
          | ident "(" phi {"," phi} ")"
          | "(" phi ")"

Transformer-expression bodies (operator definitions, completeness inputs)
reuse the same grammar extended with "#k" argument placeholders and the
"pre"/"post"/"pre~"/"post~" transformer keywords.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import FormulaSyntaxError
from .lattice import StateSet


@dataclass(frozen=True)
class Atom:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Arg:
    """Placeholder #k (1-based) inside an operator definition."""

    index: int

    def __repr__(self) -> str:
        return f"#{self.index}"


@dataclass(frozen=True)
class Const:
    """A fixed set; used for atom interpretations in completeness checks."""

    value: StateSet

    def __repr__(self) -> str:
        return repr(self.value)


@dataclass(frozen=True)
class App:
    op: str
    args: tuple["Node", ...]

    def __repr__(self) -> str:
        if self.op == "not":
            return f"!{self.args[0]!r}"
        if self.op in ("and", "or"):
            glue = " & " if self.op == "and" else " | "
            return "(" + glue.join(repr(a) for a in self.args) + ")"
        # prefix style only where the grammar accepts it; custom operators
        # print in call style so that reprs stay parseable
        if self.op in UNARY_KEYWORDS or EF_PATTERN.match(self.op):
            inner = self.args[0]
            if isinstance(inner, (Atom, Arg, Const)):
                return f"{self.op} {inner!r}"
            return f"{self.op} ({inner!r})"
        return f"{self.op}({', '.join(repr(a) for a in self.args)})"


Node = Union[Atom, Arg, Const, App]
Formula = Node

BINARY_KEYWORDS = ("EU", "AU", "ER", "AR")
UNARY_KEYWORDS = ("EX", "AX", "pre", "post", "pre~", "post~")
EF_PATTERN = re.compile(r"^EF\[(\d+),(\d+)\]$")

_TOKEN = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*~?)|(?P<int>\d+)|(?P<arg>#\d+)"
    r"|(?P<punct>[!&|(),\[\]]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, allow_placeholders: bool):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.allow_placeholders = allow_placeholders

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            raise FormulaSyntaxError(f"expected {value!r}, found {val!r}", pos)

    def parse(self) -> Node:
        node = self.or_level()
        kind, val, pos = self.peek()
        if kind is not None:
            raise FormulaSyntaxError(f"trailing input {val!r}", pos)
        return node

    def or_level(self) -> Node:
        node = self.and_level()
        while self.peek()[1] == "|":
            self.take()
            node = App("or", (node, self.and_level()))
        return node

    def and_level(self) -> Node:
        node = self.unary_level()
        while self.peek()[1] == "&":
            self.take()
            node = App("and", (node, self.unary_level()))
        return node

    def unary_level(self) -> Node:
        kind, val, pos = self.peek()
        if val == "!":
            self.take()
            return App("not", (self.unary_level(),))
        if kind == "ident" and val in UNARY_KEYWORDS:
            self.take()
            return App(val, (self.unary_level(),))
        if kind == "ident" and val == "EF":
            self.take()
            self.expect("[")
            lo = self.int_token()
            self.expect(",")
            hi = self.int_token()
            self.expect("]")
            if lo > hi:
                raise FormulaSyntaxError(f"empty bound range [{lo},{hi}]", pos)
            return App(f"EF[{lo},{hi}]", (self.unary_level(),))
        return self.primary()

    def int_token(self) -> int:
        kind, val, pos = self.take()
        if kind != "int":
            raise FormulaSyntaxError(f"expected an integer, found {val!r}", pos)
        return int(val)

    def primary(self) -> Node:
        kind, val, pos = self.take()
        if val == "(":
            node = self.or_level()
            self.expect(")")
            return node
        if kind == "arg":
            if not self.allow_placeholders:
                raise FormulaSyntaxError("argument placeholders are not allowed here", pos)
            index = int(val[1:])
            if index < 1:
                raise FormulaSyntaxError("placeholder indices are 1-based", pos)
            return Arg(index)
        if kind == "ident":
            if val in BINARY_KEYWORDS:
                self.expect("(")
                left = self.or_level()
                self.expect(",")
                right = self.or_level()
                self.expect(")")
                return App(val, (left, right))
            if self.peek()[1] == "(":
                self.take()
                args = [self.or_level()]
                while self.peek()[1] == ",":
                    self.take()
                    args.append(self.or_level())
                self.expect(")")
                return App(val, tuple(args))
            return Atom(val)
        raise FormulaSyntaxError(f"unexpected token {val!r}", pos)


def parse_formula(text: str) -> Formula:
    """Parse a state formula; atoms are resolved later against a language."""
    return _Parser(text, allow_placeholders=False).parse()


def parse_transformer(text: str) -> Node:
    """Parse an operator body; "#k" refers to the k-th operator argument."""
    return _Parser(text, allow_placeholders=True).parse()


def max_placeholder(node: Node) -> int:
    if isinstance(node, Arg):
        return node.index
    if isinstance(node, App):
        return max((max_placeholder(a) for a in node.args), default=0)
    return 0
