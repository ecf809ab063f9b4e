import math

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from harmcone.expr import (ArityError, BinOp, Call, DomainError, FUNCTIONS, Neg, Num, ParseError,
                           Smooth, UnknownFunctionError, Var, compile_expr, derivative, parse,
                           smooth_plateau, smooth_step, to_text)
from harmcone.warp import builtin_catalog

# ---------------------------------------------------------------- parsing


def test_parse_identity():
    assert parse("r") == Var()


def test_parse_half_sine():
    e = parse("(r + sin(r))/2")
    assert e == BinOp("/", BinOp("+", Var(), Call("sin", Var())), Num(2.0))


def test_unbalanced_parenthesis_offset():
    with pytest.raises(ParseError) as info:
        parse("r*log(r")
    assert info.value.offset == 8


@pytest.mark.parametrize("text, kind", [
    ("foo(r)", UnknownFunctionError),
    ("sin(r, 2)", ArityError),
    ("step(r; 1)", ArityError),
    ("", ParseError),
    ("r +", ParseError),
    ("2 r", ParseError),
])
def test_parse_errors(text, kind):
    with pytest.raises(kind):
        parse(text)


def test_precedence_and_associativity():
    f = compile_expr(parse("2^3^2"))
    assert f(1.0) == 512.0  # right associative
    assert compile_expr(parse("8/4/2"))(1.0) == 1.0  # left associative
    assert compile_expr(parse("-r^2"))(3.0) == -9.0  # ^ binds tighter than unary minus
    assert compile_expr(parse("1 - 2 - 3"))(0.0) == -4.0


def test_constants():
    assert compile_expr(parse("pi + e"))(0.0) == pytest.approx(math.pi + math.e)


def test_domain_errors_are_reported():
    with pytest.raises(DomainError):
        compile_expr(parse("log(r - 2)"))(1.0)
    with pytest.raises(DomainError):
        compile_expr(parse("1/(r - 1)"))(1.0)
    with pytest.raises(DomainError):
        compile_expr(parse("exp(r)"))(1000.0)


# ---------------------------------------------------------------- round trip

_nums = st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False).map(Num)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.builds(BinOp, st.sampled_from("+-*/^"), children, children),
        st.builds(Call, st.sampled_from(FUNCTIONS), children),
        st.builds(lambda a, c, w: Smooth("step", 0, a, (c, c + w)), children,
                  st.floats(0, 10), st.floats(0.5, 5)),
        st.builds(lambda a, o, c: Smooth("bump", o, a, (c, 1.0, 2.0)), children,
                  st.integers(0, 2), st.floats(0, 10)),
    )


def _depth(e) -> int:
    if isinstance(e, (Num, Var)):
        return 0
    if isinstance(e, BinOp):
        return 1 + max(_depth(e.left), _depth(e.right))
    return 1 + _depth(e.arg)


trees = st.recursive(st.one_of(_nums, st.just(Var())), _extend, max_leaves=24).filter(
    lambda e: _depth(e) <= 6)


@settings(max_examples=1000, deadline=None)
@given(trees)
def test_print_parse_round_trip(e):
    assert parse(to_text(e)) == e


@pytest.mark.parametrize("w", [w for w in builtin_catalog() if w.expr is not None],
                         ids=lambda w: w.name)
def test_catalog_formulas_round_trip(w):
    assert parse(to_text(w.expr)) == w.expr


# ---------------------------------------------------------------- derivatives


def _sympy(e, r):
    if isinstance(e, Num):
        return sympy.Float(e.value)
    if isinstance(e, Var):
        return r
    if isinstance(e, Neg):
        return -_sympy(e.arg, r)
    if isinstance(e, Call):
        return getattr(sympy, e.name)(_sympy(e.arg, r))
    a, b = _sympy(e.left, r), _sympy(e.right, r)
    return {"+": a + b, "-": a - b, "*": a * b, "/": a / b, "^": a ** b}[e.op]


smooth_trees = st.recursive(
    st.one_of(st.floats(0.5, 3).map(Num), st.just(Var())),
    lambda ch: st.one_of(
        ch.map(Neg),
        st.builds(BinOp, st.sampled_from("+-*"), ch, ch),
        st.builds(Call, st.sampled_from(("sin", "cos", "tanh", "exp")), ch),
        st.builds(lambda a, k: BinOp("^", a, Num(float(k))), ch, st.integers(2, 3)),
    ),
    max_leaves=8)


@settings(max_examples=200, deadline=None)
@given(smooth_trees, st.floats(0.2, 2.0))
def test_derivative_matches_sympy(e, x):
    r = sympy.Symbol("r", positive=True)
    try:
        expected = float(sympy.diff(_sympy(e, r), r).subs(r, x))
        got = compile_expr(derivative(e))(x)
    except (DomainError, OverflowError, ZeroDivisionError):
        return
    if not math.isfinite(expected) or abs(expected) > 1e12:
        return
    assert got == pytest.approx(expected, rel=1e-9, abs=1e-9)


def test_derivative_of_smooth_step_matches_finite_difference():
    e = parse("r * step(r; 1, 3)")
    f, f1 = compile_expr(e), compile_expr(derivative(e))
    for x in (0.5, 1.2, 2.0, 2.9, 4.0):
        h = 1e-6
        assert f1(x) == pytest.approx((f(x + h) - f(x - h)) / (2 * h), abs=1e-6)


# ---------------------------------------------------------------- smooth primitives


def test_smooth_step_limits_and_symmetry():
    assert smooth_step(0.0, 1.0, 2.0) == 0.0
    assert smooth_step(3.0, 1.0, 2.0) == 1.0
    assert smooth_step(1.5, 1.0, 2.0) == pytest.approx(0.5)


@given(st.floats(-5, 5))
def test_plateau_in_unit_interval_and_even(x):
    v = smooth_plateau(x, 0.0, 1.0, 2.0)
    assert 0.0 <= v <= 1.0
    assert v == pytest.approx(smooth_plateau(-x, 0.0, 1.0, 2.0), abs=1e-15)
