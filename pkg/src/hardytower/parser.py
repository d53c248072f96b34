"""Infix grammar for field elements and differential polynomials.

::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := primary ("^" unary)?                  (right associative)
    primary := NUMBER | "x" | YDER
             | ("ell" | "gamma" | "lambda" | "omega_seq" | "g") "(" INTEGER ")"
             | ("exp" | "log") "(" expr ")"
             | "(" expr ")"
    YDER    := "Y" "'"* | "Y^(" INTEGER ")"

``Y^(k)`` directly after a bare ``Y`` is the k-th derivative; ``Y^k`` (no
parentheses) is a power.  NUMBER is an integer or a decimal such as ``0.25``
(read exactly).  Exponents must lower to rational constants.

Parsing produces a small AST (:class:`Node` subclasses) that remembers source
spans so lowering errors can quote the offending subterm.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .diffpoly import DiffPoly
from .errors import LoweringError, ParseError, UnsupportedPower, ZeroDivisionInField
from .field import FieldElem, LCombo
from .monomial import TowerMonomial
from . import tower

BUILTINS = {
    "ell": tower.ell,
    "gamma": tower.gamma,
    "lambda": tower.lambda_,
    "omega_seq": tower.omega_seq,
    "g": tower.g,
}
FUNCTIONS = ("exp", "log")
DEFAULT_MAX_ORDER = 5


# --- AST ------------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    start: int
    end: int


@dataclass(frozen=True)
class Num(Node):
    value: Fraction


@dataclass(frozen=True)
class Var(Node):
    pass


@dataclass(frozen=True)
class YDer(Node):
    order: int


@dataclass(frozen=True)
class Builtin(Node):
    name: str
    index: int


@dataclass(frozen=True)
class Func(Node):
    name: str
    arg: Node


@dataclass(frozen=True)
class Neg(Node):
    operand: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: Node


@dataclass(frozen=True)
class SourceExpr:
    """Parsed text together with its AST."""

    text: str
    root: Node

    def subterm(self, node: Node) -> str:
        return self.text[node.start:node.end].strip()


# --- tokens ---------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d*)?|\.\d+)
  | (?P<yder>Y\^\(\s*\d+\s*\))
  | (?P<yprime>Y(?:'|′|″)*)(?![A-Za-z0-9_])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


def _prime_count(tok: str) -> int:
    return tok.count("'") + tok.count("′") + 2 * tok.count("″")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            what = repr(self.tok.text) if self.tok.kind != "eof" else "end of input"
            raise ParseError(f"expected {text!r}, found {what}", self.tok.pos, self.text)
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "eof":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos, self.text)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            rhs = self.term()
            node = BinOp(node.start, rhs.end, op, node, rhs)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.advance().text
            rhs = self.unary()
            node = BinOp(node.start, rhs.end, op, node, rhs)
        return node

    def unary(self) -> Node:
        if self.tok.text in ("-", "+"):
            t = self.advance()
            operand = self.unary()
            if t.text == "+":
                return operand
            return Neg(t.pos, operand.end, operand)
        return self.power()

    def power(self) -> Node:
        base = self.primary()
        if self.tok.text == "^":
            self.advance()
            exponent = self.unary()
            return Pow(base.start, exponent.end, base, exponent)
        return base

    def primary(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(t.pos, t.pos + len(t.text), Fraction(t.text))
        if t.kind == "yder":
            self.advance()
            k = int(t.text[t.text.index("(") + 1:t.text.index(")")])
            return YDer(t.pos, t.pos + len(t.text), k)
        if t.kind == "yprime":
            self.advance()
            return YDer(t.pos, t.pos + len(t.text), _prime_count(t.text))
        if t.kind == "ident":
            self.advance()
            if t.text == "x":
                return Var(t.pos, t.pos + 1)
            if t.text in BUILTINS:
                self.expect("(")
                idx = self.tok
                if idx.kind != "num" or not idx.text.isdigit():
                    raise ParseError(f"{t.text}() takes a non-negative integer", idx.pos, self.text)
                self.advance()
                close = self.expect(")")
                return Builtin(t.pos, close.pos + 1, t.text, int(idx.text))
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                close = self.expect(")")
                return Func(t.pos, close.pos + 1, t.text, arg)
            raise ParseError(f"unknown identifier {t.text!r}", t.pos, self.text)
        if t.text == "(":
            self.advance()
            inner = self.expr()
            close = self.expect(")")
            # widen the span to include the parentheses
            return _respan(inner, t.pos, close.pos + 1)
        what = repr(t.text) if t.kind != "eof" else "end of input"
        raise ParseError(f"unexpected {what}", t.pos, self.text)


def _respan(node: Node, start: int, end: int) -> Node:
    fields = {k: v for k, v in node.__dict__.items() if k not in ("start", "end")}
    return type(node)(start, end, **fields)


def parse(text: str) -> SourceExpr:
    """Parse ``text`` into a :class:`SourceExpr` without lowering it."""
    return SourceExpr(text, _Parser(text).parse())


# --- lowering to FieldElem --------------------------------------------------


def _exp_of(arg: FieldElem, src: SourceExpr, node: Node) -> FieldElem:
    """``exp(arg)`` for ``arg = p(x) + sum_n c_n ell(n+1)`` with ``p(0) = 0``."""
    if not arg.is_laurent():
        raise LoweringError("exp argument is not a polynomial in x", src.subterm(node))
    poly: dict[int, Fraction] = {}
    logs: dict[int, Fraction] = {}
    for m, c in arg.num:
        if m.is_one():
            raise LoweringError("exp argument has a non-zero constant term", src.subterm(node))
        if m.exp_part:
            raise LoweringError("exp argument outside the lattice", src.subterm(node))
        nz = m.log_exponents
        if len(nz) != 1:
            raise LoweringError("exp argument outside the lattice", src.subterm(node))
        (n, q), = nz.items()
        if n == 0 and q.denominator == 1 and q > 0:
            poly[q.numerator] = c
        elif n >= 1 and q == 1:
            logs[n - 1] = c
        else:
            raise LoweringError("exp argument outside the lattice", src.subterm(node))
    return FieldElem.from_monomial(TowerMonomial.make(exp_part=poly, log_exponents=logs))


def _log_of(arg: FieldElem, src: SourceExpr, node: Node) -> FieldElem:
    """``log(m) = p(x) + sum_n q_n ell(n+1)`` for a monomial ``m = exp(p) prod ell_n^q_n``."""
    if not arg.is_laurent() or len(arg.num) != 1:
        raise LoweringError("log argument is not a single tower monomial", src.subterm(node))
    (m, c), = arg.num
    if c != 1:
        raise LoweringError("log of a monomial with coefficient other than 1", src.subterm(node))
    terms: dict[TowerMonomial, Fraction] = {}
    for k, a in enumerate(m.exp_part):
        if a:
            terms[TowerMonomial.ell(0, k + 1)] = a
    for n, q in m.log_exponents.items():
        terms[TowerMonomial.ell(n + 1)] = q
    return FieldElem.from_combo(LCombo(terms))


def _constant_exponent(value, src: SourceExpr, node: Node) -> Fraction:
    if isinstance(value, DiffPoly):
        raise LoweringError("exponent must be a rational constant", src.subterm(node))
    r = value.constant_value()
    if r is None:
        raise LoweringError("exponent must be a rational constant", src.subterm(node))
    return r


def _lower(node: Node, src: SourceExpr, allow_y: bool, max_order: int):
    def rec(n):
        return _lower(n, src, allow_y, max_order)

    def field_only(n, what):
        v = rec(n)
        if isinstance(v, DiffPoly):
            raise LoweringError(f"{what} must not contain Y", src.subterm(n))
        return v

    if isinstance(node, Num):
        return FieldElem.constant(node.value)
    if isinstance(node, Var):
        return FieldElem.x()
    if isinstance(node, YDer):
        if not allow_y:
            raise LoweringError("Y is only allowed in differential polynomials", src.subterm(node))
        if node.order > max_order:
            raise LoweringError(f"derivative order exceeds {max_order}", src.subterm(node))
        return DiffPoly.Y(node.order)
    if isinstance(node, Builtin):
        return BUILTINS[node.name](node.index)
    if isinstance(node, Func):
        arg = field_only(node.arg, f"{node.name} argument")
        if node.name == "exp":
            return _exp_of(arg, src, node)
        return _log_of(arg, src, node)
    if isinstance(node, Neg):
        return -rec(node.operand)
    if isinstance(node, BinOp):
        left = rec(node.left)
        if node.op == "/":
            right = field_only(node.right, "divisor")
            if right.is_zero():
                raise LoweringError("division by zero", src.subterm(node))
            return left * right.inverse()
        right = rec(node.right)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        return left * right
    if isinstance(node, Pow):
        base = rec(node.base)
        r = _constant_exponent(rec(node.exponent), src, node.exponent)
        if isinstance(base, DiffPoly):
            if r.denominator != 1 or r < 0:
                raise LoweringError("powers of Y must be non-negative integers", src.subterm(node))
            return base ** r.numerator
        try:
            return base ** r
        except ZeroDivisionInField:
            raise LoweringError("negative power of zero", src.subterm(node)) from None
        except UnsupportedPower as exc:
            raise LoweringError(str(exc), src.subterm(node)) from None
    raise TypeError(f"unknown node {node!r}")


def lower(src: SourceExpr) -> FieldElem:
    return _lower(src.root, src, False, DEFAULT_MAX_ORDER)


def parse_expr(text: str) -> FieldElem:
    """Parse and lower ``text`` to a :class:`~hardytower.field.FieldElem`."""
    return lower(parse(text))


def parse_diffpoly(text: str, max_order: int = DEFAULT_MAX_ORDER) -> DiffPoly:
    """Parse a differential polynomial such as ``"4*Y'' + omega_seq(1)*Y"``."""
    src = parse(text)
    value = _lower(src.root, src, True, max_order)
    if isinstance(value, FieldElem):
        return DiffPoly.constant(value)
    return value


__all__ = [
    "SourceExpr",
    "parse",
    "lower",
    "parse_expr",
    "parse_diffpoly",
    "tokenize",
]
