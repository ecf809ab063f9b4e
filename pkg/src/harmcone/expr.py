"""Expression trees in one variable ``r``: parsing, printing, differentiation.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = atom [ "^" unary ] ;                  (* right associative *)
    atom    = number | "r" | "pi" | "e"
            | func "(" expr ")"
            | smooth "(" expr (";" | ",") const { "," const } ")"
            | "(" expr ")" ;
    func    = "sin" | "cos" | "exp" | "log" | "sqrt" | "tanh" | "sinh" | "cosh" ;
    smooth  = "bump" | "step" | "bump_d1" | "bump_d2" | "step_d1" | "step_d2" ;

``bump(x; c, inner, outer)`` is a smooth plateau: 1 for ``|x - c| <= inner``,
0 for ``|x - c| >= outer``, monotone in between.  ``step(x; a, b)`` is the
smooth monotone ramp from 0 (``x <= a``) to 1 (``x >= b``).  The ``_d1``/``_d2``
forms are their derivatives with respect to the first argument; they appear
in differentiated trees and parse back so printing always round-trips.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

__all__ = [
    "Expr", "Num", "Var", "Neg", "BinOp", "Call", "Smooth",
    "ParseError", "UnknownFunctionError", "ArityError", "DomainError",
    "parse", "to_text", "derivative", "compile_expr", "is_constant",
    "FUNCTIONS", "smooth_step", "smooth_plateau", "log_plateau",
]


class ParseError(ValueError):
    """Syntax error; ``offset`` is the 1-based byte position of the offending token."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownFunctionError(ParseError):
    pass


class ArityError(ParseError):
    pass


class DomainError(ValueError):
    """Evaluation left the domain (log of nonpositive, division by zero, overflow)."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"


@dataclass(frozen=True)
class Smooth:
    kind: str  # "bump" or "step"
    order: int  # derivative order with respect to arg, 0..2
    arg: "Expr"
    params: tuple[float, ...]


Expr = Union[Num, Var, Neg, BinOp, Call, Smooth]

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "tanh", "sinh", "cosh")
_SMOOTH_ARITY = {"bump": 3, "step": 2}
_CONSTANTS = {"pi": math.pi, "e": math.e}


# --------------------------------------------------------------------------
# smooth primitives


def _sigma(u: float) -> tuple[float, float, float]:
    """Ramp 0 -> 1 on [0, 1] built from exp(-1/t), with two derivatives."""
    if u <= 0.0:
        return 0.0, 0.0, 0.0
    if u >= 1.0:
        return 1.0, 0.0, 0.0
    v = 1.0 - u
    g = 1.0 / u - 1.0 / v
    # s = 1 / (1 + e^g), computed without overflow
    if g > 0.0:
        q = math.exp(-g)
        s = q / (1.0 + q)
    else:
        q = math.exp(g)
        s = 1.0 / (1.0 + q)
    w = s * (1.0 - s)
    if w == 0.0:
        return s, 0.0, 0.0
    g1 = -1.0 / (u * u) - 1.0 / (v * v)
    g2 = 2.0 / u**3 - 2.0 / v**3
    return s, -w * g1, w * ((1.0 - 2.0 * s) * g1 * g1 - g2)


def smooth_step(x: float, a: float, b: float, order: int = 0) -> float:
    width = b - a
    s = _sigma((x - a) / width)
    return s[order] / width**order


def smooth_plateau(x: float, c: float, inner: float, outer: float, order: int = 0) -> float:
    d = x - c
    t = abs(d)
    if t <= inner:
        return 1.0 if order == 0 else 0.0
    # 1 - sigma(u) == sigma(1 - u); the mirrored form keeps tiny tails exact
    width = outer - inner
    s = _sigma((outer - t) / width)
    if order == 0:
        return s[0]
    if order == 1:
        return -s[1] / width if d > 0 else s[1] / width
    return s[2] / width**2


def log_plateau(x: float, c: float, inner: float, outer: float) -> tuple[float, float, float]:
    """(log psi, psi'/psi, psi''/psi) for the plateau; log psi = -inf off the support.

    Lets callers form e^r psi(x) without psi underflowing first.
    """
    d = x - c
    t = abs(d)
    if t <= inner:
        return 0.0, 0.0, 0.0
    if t >= outer:
        return -math.inf, 0.0, 0.0
    width = outer - inner
    u = (outer - t) / width
    v = 1.0 - u
    g = 1.0 / u - 1.0 / v
    if g > 0.0:
        log_s = -g - math.log1p(math.exp(-g))
        one_minus = 1.0 / (1.0 + math.exp(-g))
    else:
        log_s = -math.log1p(math.exp(g))
        one_minus = math.exp(g) / (1.0 + math.exp(g))
    s = math.exp(log_s)
    g1 = -1.0 / (u * u) - 1.0 / (v * v)
    g2 = 2.0 / u**3 - 2.0 / v**3
    r1 = -one_minus * g1  # sigma'/sigma in u
    r2 = one_minus * ((1.0 - 2.0 * s) * g1 * g1 - g2)
    du = -1.0 / width if d > 0 else 1.0 / width
    return log_s, r1 * du, r2 * du * du


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),;]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    encoded_prefix = lambda i: len(text[:i].encode("utf-8")) + 1
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", encoded_prefix(bad))
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), encoded_prefix(m.start(kind))))
        pos = m.end()
    toks.append(_Tok("end", "", len(text.encode("utf-8")) + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.peek()
        if tok.text != text or tok.kind == "end":
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(f"expected {text!r}, found {found}", tok.offset)
        return self.take()

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.offset)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek().text in ("+", "-") and self.peek().kind == "op":
            op = self.take().text
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek().text in ("*", "/") and self.peek().kind == "op":
            op = self.take().text
            e = BinOp(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.peek().kind == "op" and self.peek().text == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.take()
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "op" and tok.text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "name":
            if tok.text == "r":
                return Var()
            if tok.text in _CONSTANTS:
                return Num(_CONSTANTS[tok.text])
            if self.peek().text != "(":
                raise ParseError(f"unknown name {tok.text!r}", tok.offset)
            return self.call(tok)
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {found}", tok.offset)

    def call(self, name_tok: _Tok) -> Expr:
        name = name_tok.text
        kind, order = name, 0
        for k in _SMOOTH_ARITY:
            for o in (1, 2):
                if name == f"{k}_d{o}":
                    kind, order = k, o
        if kind not in _SMOOTH_ARITY and name not in FUNCTIONS:
            raise UnknownFunctionError(f"unknown function {name!r}", name_tok.offset)
        self.expect("(")
        arg = self.expr()
        if name in FUNCTIONS:
            if self.peek().text in (",", ";"):
                raise ArityError(f"{name} takes 1 argument", self.peek().offset)
            self.expect(")")
            return Call(name, arg)
        want = _SMOOTH_ARITY[kind]
        params = []
        sep = self.peek()
        if sep.text in (",", ";"):
            self.take()
            params.append(self.constant())
            while self.peek().text == ",":
                self.take()
                params.append(self.constant())
        if len(params) != want:
            raise ArityError(f"{kind} takes 1 argument and {want} parameters", name_tok.offset)
        self.expect(")")
        return Smooth(kind, order, arg, tuple(params))

    def constant(self) -> float:
        start = self.peek().offset
        e = self.expr()
        if not is_constant(e):
            raise ParseError("smooth-function parameters must be constant", start)
        return float(compile_expr(e)(1.0))


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree."""
    if not text or not text.strip():
        raise ParseError("empty expression", 1)
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Num) and (e.value < 0 or math.copysign(1.0, e.value) < 0):
        return 3
    return 5


def _fmt_num(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_text(e: Expr) -> str:
    """Canonical text; ``parse(to_text(e)) == e`` for parser-produced trees."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, Var):
        return "r"
    if isinstance(e, Neg):
        inner = to_text(e.arg)
        return f"-({inner})" if _prec(e.arg) < 3 else f"-{inner}"
    if isinstance(e, Call):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Smooth):
        name = e.kind if e.order == 0 else f"{e.kind}_d{e.order}"
        params = ", ".join(_fmt_num(p) for p in e.params)
        return f"{name}({to_text(e.arg)}; {params})"
    p = _PREC[e.op]
    left, right = to_text(e.left), to_text(e.right)
    if e.op == "^":
        if _prec(e.left) <= p:
            left = f"({left})"
        if _prec(e.right) < p:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


# --------------------------------------------------------------------------
# construction helpers with light constant folding


def is_constant(e: Expr) -> bool:
    if isinstance(e, Num):
        return True
    if isinstance(e, Var):
        return False
    if isinstance(e, Neg):
        return is_constant(e.arg)
    if isinstance(e, BinOp):
        return is_constant(e.left) and is_constant(e.right)
    return is_constant(e.arg)


def _is(e: Expr, v: float) -> bool:
    return isinstance(e, Num) and e.value == v


def _fold(e: Expr) -> Expr:
    if is_constant(e):
        try:
            v = compile_expr(e)(1.0)
        except DomainError:
            return e
        if math.isfinite(v):
            return Num(v)
    return e


def add(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    return _fold(BinOp("+", a, b))


def sub(a: Expr, b: Expr) -> Expr:
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return neg(b)
    return _fold(BinOp("-", a, b))


def mul(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0) or _is(b, 0.0):
        return Num(0.0)
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    return _fold(BinOp("*", a, b))


def div(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0):
        return Num(0.0)
    if _is(b, 1.0):
        return a
    return _fold(BinOp("/", a, b))


def power(a: Expr, b: Expr) -> Expr:
    if _is(b, 1.0):
        return a
    if _is(b, 0.0):
        return Num(1.0)
    return _fold(BinOp("^", a, b))


def neg(a: Expr) -> Expr:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


# --------------------------------------------------------------------------
# differentiation


def derivative(e: Expr) -> Expr:
    """Symbolic derivative with respect to ``r``."""
    if isinstance(e, Num):
        return Num(0.0)
    if isinstance(e, Var):
        return Num(1.0)
    if isinstance(e, Neg):
        return neg(derivative(e.arg))
    if isinstance(e, Smooth):
        if e.order >= 2:
            raise NotImplementedError("third derivatives of smooth primitives")
        inner = Smooth(e.kind, e.order + 1, e.arg, e.params)
        return mul(inner, derivative(e.arg))
    if isinstance(e, Call):
        a, da = e.arg, derivative(e.arg)
        if _is(da, 0.0):
            return Num(0.0)
        outer = {
            "sin": lambda: Call("cos", a),
            "cos": lambda: neg(Call("sin", a)),
            "exp": lambda: Call("exp", a),
            "log": lambda: div(Num(1.0), a),
            "sqrt": lambda: div(Num(1.0), mul(Num(2.0), Call("sqrt", a))),
            "tanh": lambda: div(Num(1.0), power(Call("cosh", a), Num(2.0))),
            "sinh": lambda: Call("cosh", a),
            "cosh": lambda: Call("sinh", a),
        }[e.name]()
        return mul(outer, da)
    u, v = e.left, e.right
    du, dv = derivative(u), derivative(v)
    if e.op == "+":
        return add(du, dv)
    if e.op == "-":
        return sub(du, dv)
    if e.op == "*":
        return add(mul(du, v), mul(u, dv))
    if e.op == "/":
        if is_constant(v):
            return div(du, v)
        return div(sub(mul(du, v), mul(u, dv)), power(v, Num(2.0)))
    # u ^ v
    if is_constant(v):
        return mul(mul(v, power(u, sub(v, Num(1.0)))), du)
    if is_constant(u):
        return mul(mul(e, Call("log", u)), dv)
    return mul(e, add(mul(dv, Call("log", u)), div(mul(v, du), u)))


# --------------------------------------------------------------------------
# compilation

_NS: dict = {
    "_sin": math.sin, "_cos": math.cos, "_exp": math.exp, "_log": math.log,
    "_sqrt": math.sqrt, "_tanh": math.tanh, "_sinh": math.sinh, "_cosh": math.cosh,
    "_pow": math.pow, "_step": smooth_step, "_bump": smooth_plateau,
}


def _src(e: Expr) -> str:
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return "r"
    if isinstance(e, Neg):
        return f"(-{_src(e.arg)})"
    if isinstance(e, Call):
        return f"_{e.name}({_src(e.arg)})"
    if isinstance(e, Smooth):
        params = ", ".join(repr(p) for p in e.params)
        return f"_{e.kind}({_src(e.arg)}, {params}, {e.order})"
    if e.op == "^":
        return f"_pow({_src(e.left)}, {_src(e.right)})"
    return f"({_src(e.left)} {e.op} {_src(e.right)})"


def compile_expr(e: Expr) -> Callable[[float], float]:
    """Compile to a scalar function of ``r`` raising :class:`DomainError`."""
    raw = eval(compile(f"lambda r: {_src(e)}", "<expr>", "eval"), dict(_NS))

    def f(r: float) -> float:
        try:
            return float(raw(r))
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(f"{to_text(e)} undefined at r={r!r}: {exc}") from None

    return f
