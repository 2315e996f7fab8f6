import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracsph.errors import EvaluationError
from fracsph.expr import Binary, Num, ParseError, evaluate, is_constant, parse, to_source


def ev(src, x=0.0):
    return evaluate(parse(src), x)


def test_examples():
    assert ev("0.5 + 0.3*sin(4*pi*x)", 0.0) == 0.5
    assert ev("0.5 + 0.3*sin(4*pi*x)", 1 / 8) == pytest.approx(0.8, abs=1e-15)
    assert ev("(x-1)^3", 3.0) == 8.0


def test_precedence_and_associativity():
    assert ev("2^3^2") == 512.0
    assert ev("2**3**2") == 512.0
    assert ev("-2^2") == -4.0
    assert ev("2^-1") == 0.5
    assert ev("1 - 2 - 3") == -4.0
    assert ev("8 / 4 / 2") == 1.0
    assert ev("2 + 3 * 4") == 14.0


def test_functions_and_constants():
    assert ev("pow(2, 10)") == 1024.0
    assert ev("sqrt(abs(-16))") == 4.0
    assert ev("exp(0) + cos(pi)") == 0.0
    assert ev("1e-3 * 2.5E2") == 0.25


def test_array_evaluation():
    x = np.linspace(0, 1, 5)
    np.testing.assert_allclose(evaluate(parse("x^2 + 1"), x), x**2 + 1)
    assert evaluate(parse("3"), x).shape == x.shape


@pytest.mark.parametrize(
    "src,offset",
    [("sin(", 4), ("1 +", 3), ("4pi", 1), ("x y", 2), ("foo(x)", 0), ("(1", 2), ("1 $ 2", 2), ("", 0)],
)
def test_parse_errors_report_offset(src, offset):
    with pytest.raises(ParseError) as info:
        parse(src)
    assert info.value.offset == offset
    assert f"at offset {offset}" in str(info.value)


def test_wrong_arity():
    with pytest.raises(ParseError):
        parse("pow(2)")
    with pytest.raises(ParseError):
        parse("sin(1, 2)")


def test_offset_counts_bytes():
    with pytest.raises(ParseError) as info:
        parse("1 + é")
    assert info.value.offset == 4


@pytest.mark.parametrize("src", ["1/0", "1/(x-x)", "sqrt(-1)", "(-8)^(1/3)"])
def test_evaluation_errors(src):
    with pytest.raises(EvaluationError):
        ev(src, 0.5)


def test_division_by_zero_in_arrays():
    with pytest.raises(EvaluationError):
        evaluate(parse("1/x"), np.array([1.0, 0.0]))


def test_negative_base_integer_power():
    assert ev("(-2)^3") == -8.0


def test_is_constant():
    assert is_constant(parse("0.75"))
    assert is_constant(parse("sin(pi/4)*2"))
    assert not is_constant(parse("0.5 + 0*x"))


def test_canonical_printer():
    assert to_source(parse("1+2*x")) == "(1.0 + (2.0 * x))"
    tree = parse("-x^2")
    assert evaluate(parse(to_source(tree)), 3.0) == -9.0


def test_ast_is_immutable():
    tree = parse("1 + 2")
    assert isinstance(tree, Binary)
    with pytest.raises(AttributeError):
        tree.op = "-"
    assert parse("1 + 2") == tree
    assert hash(Num(1.0)) == hash(Num(1.0))


atoms = st.sampled_from(["x", "pi", "1", "0.5", "2.25", "3e-2"])


def _grow(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*", "/", "^", "**"]), children).map(
            lambda t: f"{t[0]} {t[1]} {t[2]}"
        ),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "abs", "sqrt"]), children).map(lambda t: f"{t[0]}({t[1]})"),
        children.map(lambda c: f"-{c}"),
        children.map(lambda c: f"({c})"),
        st.tuples(children, children).map(lambda t: f"pow({t[0]}, {t[1]})"),
    )


def _depth(n):
    strat = atoms
    for _ in range(n):
        strat = st.one_of(atoms, _grow(strat))
    return strat


well_formed = _depth(6)


@settings(max_examples=300, deadline=None)
@given(well_formed)
def test_round_trip_idempotent(src):
    tree = parse(src)
    printed = to_source(tree)
    assert parse(printed) == tree
    assert to_source(parse(printed)) == printed


@settings(max_examples=300, deadline=None)
@given(well_formed, st.floats(-3, 3))
def test_evaluation_is_pure(src, x):
    tree = parse(src)
    try:
        first = evaluate(tree, x)
    except (EvaluationError, OverflowError):
        return
    second = evaluate(tree, x)
    assert (math.isnan(first) and math.isnan(second)) or first == second


@settings(max_examples=500, deadline=None)
@given(st.text(alphabet="x0123456789.+-*/^()pisncoexqrtabw, e", max_size=40))
def test_fuzz_only_parse_errors(src):
    try:
        parse(src)
    except ParseError:
        pass
