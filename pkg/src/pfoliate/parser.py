"""Recursive-descent parser for polynomials and derivations.

Grammar (whitespace ignored)::

    input  := expr [ "(" "mod" INT ")" ]
    expr   := ["+"|"-"] term (("+"|"-") term)*
    term   := factor (["*"] factor)*
    factor := atom ["^" ["-"] INT]
    atom   := INT | NAME | "d" NAME | "(" expr ")"

``d<var>`` stands for the partial derivative along a ring variable and may
only appear linearly.  Coefficients are reduced mod p.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .derivation import Derivation
from .errors import LaurentSlotError, ParseError, PfoliateError
from .gfpoly import Poly, Ring

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*^()]))")


@dataclass(frozen=True)
class Token:
    kind: str  # int, name, op, end
    text: str
    offset: int


def tokenize(src: str) -> list[Token]:
    out = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Token(kind, m.group(kind), start))
        pos = m.end()
    out.append(Token("end", "", len(src)))
    return out


class _Linear:
    """A polynomial part plus a linear combination of d<var> symbols."""

    __slots__ = ("poly", "d")

    def __init__(self, poly: Poly, d: dict[str, Poly] | None = None):
        self.poly = poly
        self.d = d or {}

    @property
    def has_d(self) -> bool:
        return any(not c.is_zero() for c in self.d.values())

    def add(self, other: _Linear, sign: int = 1) -> _Linear:
        d = dict(self.d)
        for k, v in other.d.items():
            d[k] = d.get(k, v.ring.zero()) + (v if sign > 0 else -v)
        return _Linear(self.poly + (other.poly if sign > 0 else -other.poly), d)

    def neg(self) -> _Linear:
        return _Linear(-self.poly, {k: -v for k, v in self.d.items()})


class _Parser:
    def __init__(self, src: str, ring: Ring, allow_d: bool):
        self.src = src
        self.ring = ring
        self.allow_d = allow_d
        self.tokens = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        raise ParseError(msg, t.offset)

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            found = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            self.error(f"expected {text!r}, found {found}")
        return self.advance()

    def parse(self) -> _Linear:
        val = self.expr()
        if self.tok.text == "(" and self.tokens[self.i + 1].text == "mod":
            self.advance()
            self.advance()
            t = self.tok
            if t.kind != "int":
                self.error("expected modulus")
            self.advance()
            if int(t.text) != self.ring.p:
                self.error(f"modulus {t.text} does not match p = {self.ring.p}", t)
            self.expect(")")
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")
        return val

    def expr(self) -> _Linear:
        sign = 1
        if self.tok.text in "+-" and self.tok.kind == "op":
            sign = -1 if self.advance().text == "-" else 1
        val = self.term()
        if sign < 0:
            val = val.neg()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            rhs = self.term()
            val = val.add(rhs, 1 if op == "+" else -1)
        return val

    def _starts_atom(self) -> bool:
        t = self.tok
        return t.kind in ("int", "name") or t.text == "("

    def term(self) -> _Linear:
        val = self.factor()
        while True:
            if self.tok.text == "*":
                self.advance()
            elif not self._starts_atom() or (self.tok.text == "(" and self.tokens[self.i + 1].text == "mod"):
                break
            start = self.tok
            rhs = self.factor()
            val = self.multiply(val, rhs, start)
        return val

    def multiply(self, a: _Linear, b: _Linear, tok: Token) -> _Linear:
        if a.has_d and b.has_d:
            self.error("product of two derivation symbols", tok)
        if a.has_d:
            a, b = b, a
        if b.has_d:
            if not b.poly.is_zero():
                self.error("cannot multiply a mixed polynomial/derivation expression", tok)
            return _Linear(self.ring.zero(), {k: v * a.poly for k, v in b.d.items()})
        return _Linear(a.poly * b.poly)

    def factor(self) -> _Linear:
        start = self.tok
        base = self.atom()
        if self.tok.text == "^":
            self.advance()
            neg = False
            if self.tok.text == "-":
                self.advance()
                neg = True
            t = self.tok
            if t.kind != "int":
                self.error("expected integer exponent")
            self.advance()
            k = int(t.text)
            if base.has_d:
                if k != 1 or neg:
                    self.error("derivation symbols cannot be raised to a power", start)
                return base
            try:
                if neg:
                    return _Linear(base.poly ** (-k))
                return _Linear(base.poly ** k)
            except PfoliateError as exc:
                self.error(str(exc), t)
        return base

    def atom(self) -> _Linear:
        t = self.tok
        ring = self.ring
        if t.kind == "int":
            self.advance()
            return _Linear(ring.const(int(t.text)))
        if t.kind == "name":
            self.advance()
            if t.text in ring.names:
                return _Linear(ring.var(t.text))
            if t.text.startswith("d") and t.text[1:] in ring.names:
                if not self.allow_d:
                    self.error("derivation symbol in a polynomial", t)
                return _Linear(ring.zero(), {t.text[1:]: ring.one()})
            self.error(f"unknown variable {t.text!r}", t)
        if t.text == "(":
            self.advance()
            val = self.expr()
            self.expect(")")
            return val
        found = "end of input" if t.kind == "end" else repr(t.text)
        self.error(f"unexpected {found}")


def check_names(ring: Ring) -> None:
    for n in ring.names:
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", n):
            raise ParseError(f"invalid variable name {n!r}", 0)
        if n.startswith("d") and n[1:] in ring.names:
            raise ParseError(f"variable name {n!r} clashes with the derivation symbol d{n[1:]}", 0)


def parse_poly(src: str, ring: Ring) -> Poly:
    check_names(ring)
    val = _Parser(src, ring, allow_d=False).parse()
    return val.poly


def parse_derivation(src: str, ring: Ring, frozen=()) -> Derivation:
    check_names(ring)
    p = _Parser(src, ring, allow_d=True)
    val = p.parse()
    if not val.poly.is_zero():
        raise ParseError("derivation has a term without a d<var> symbol", 0)
    return Derivation(ring, {k: v for k, v in val.d.items()}, frozen)
