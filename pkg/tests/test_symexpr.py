import math

import numpy as np
import pytest
from hypothesis import given, settings

from crprolong.errors import (DivisionByZeroPolynomial, NegativeSqrtArgument, ParseError,
                              PoleAtPoint, SqrtPresent)
from crprolong.ratfunc import zbarvar, zvar
from crprolong.scalar import I, ONE, Scalar
from crprolong.symexpr import (Const, Prod, Sqrt, Var, conj, eval_expr, has_sqrt, inv, is_zero,
                               normalize_rational, parse, simplify, sqrt, to_text, wirtinger_d,
                               z, zbar)

from conftest import fd_wirtinger, rational_exprs

PROPS = settings(max_examples=200, derandomize=True, deadline=None)


def same(a, b) -> bool:
    return (normalize_rational(a) - normalize_rational(b)).is_zero()


# -- scalars ---------------------------------------------------------------

def test_scalar_field_ops():
    a = Scalar(1, 2)
    b = Scalar(-3, 1) / 4
    assert (a * b) / b == a
    assert a.conj() == Scalar(1, -2)
    assert a * a.inverse() == ONE
    assert I * I == Scalar(-1)


# -- parser ----------------------------------------------------------------

def test_parse_product():
    e = parse("z1*zbar1")
    assert isinstance(e, Prod)
    assert set(e.args) == {Var(zvar(1)), Var(zbarvar(1))}


def test_parse_alias_y():
    assert same(parse("y2"), (z(2) - zbar(2)) / Const(Scalar(0, 2)))
    assert eval_expr(parse("y2"), (0j, 1 + 2j)) == pytest.approx(2.0)


def test_parse_sqrt_node():
    e = parse("sqrt(2 + y2^2)")
    assert isinstance(e, Sqrt)
    assert eval_expr(e, (0j, 1j)) == pytest.approx(math.sqrt(3), rel=1e-15)


def test_parse_unary_minus_binds_looser_than_power():
    assert same(parse("-z1^2"), -(z(1) * z(1)))


@pytest.mark.parametrize("text", ["z1 +", "z1 ** 2", "(z1", "w3", "sqrt z1", "z1 $ z2"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text, 2)


def test_parse_index_out_of_range():
    with pytest.raises(ParseError):
        parse("z3", 2)
    with pytest.raises(ParseError):
        parse("z0")


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse("z1 + * z2")
    assert "5" in str(info.value) or "position" in str(info.value)


# -- derivatives -----------------------------------------------------------

def test_wirtinger_basic():
    assert same(wirtinger_d(z(1) * zbar(1), zvar(1)), zbar(1))
    assert same(wirtinger_d(zbar(1), zvar(1)), Const(0))


def test_sqrt_rule():
    u = parse("2 + y2^2")
    d = wirtinger_d(sqrt(u), zvar(2))
    for p in [(0.1j, 0.3 + 0.2j), (0.2, -0.1 + 0.4j)]:
        expect = eval_expr(wirtinger_d(u, zvar(2)), p) / (2 * eval_expr(sqrt(u), p))
        assert eval_expr(d, p) == pytest.approx(expect, rel=1e-13)


def test_example_alpha_derivative_at_origin():
    # alpha = b/(2i - conj(a)) with a = i y2^2, b = y2 sqrt(2 + y2^2)
    alpha = parse("y2*sqrt(2 + y2^2) / (2*i - conj(i*y2^2))", 2)
    d = wirtinger_d(alpha, zvar(2))
    assert eval_expr(d, (0j, 0j)) == pytest.approx(-1 / (2 * math.sqrt(2)), abs=1e-15)
    rng = np.random.default_rng(3)
    fn = lambda p: eval_expr(alpha, p)
    for _ in range(10):
        p = 0.4 * (rng.random(2) - 0.5) + 0.4j * (rng.random(2) - 0.5)
        assert eval_expr(d, p) == pytest.approx(fd_wirtinger(fn, p, 2, False), rel=1e-6, abs=1e-9)


# -- conjugation -----------------------------------------------------------

def test_conj_example():
    e = conj(Const(I) * z(1) + zbar(2))
    assert same(e, Const(-I) * zbar(1) + z(2))


def test_conj_of_real_sqrt_is_itself():
    s = parse("sqrt(2 + y2^2)")
    assert same(conj(parse("y2")), parse("y2"))
    assert conj(s) == s or simplify(conj(s)) == simplify(s)


# -- rational normal form --------------------------------------------------

def test_binomial_cancels():
    e = parse("(z1+zbar1)^2 - z1^2 - 2*z1*zbar1 - zbar1^2")
    assert normalize_rational(e).is_zero()


def test_sqrt_present_raises():
    with pytest.raises(SqrtPresent):
        normalize_rational(parse("sqrt(2 + y1^2)"))


def test_division_by_zero_polynomial():
    with pytest.raises(DivisionByZeroPolynomial):
        normalize_rational(inv(z(1) - z(1)))


def test_quotient_cancellation():
    e = parse("(z1^2 - zbar2^2)/(z1 - zbar2)")
    assert same(e, z(1) + zbar(2))


# -- evaluation ------------------------------------------------------------

def test_eval_examples():
    assert eval_expr(z(1) * zbar(1), (3 + 4j, 0j)) == pytest.approx(25.0)


def test_eval_errors():
    with pytest.raises(NegativeSqrtArgument):
        eval_expr(parse("sqrt(-1 - y1^2)"), (0.1j,))
    with pytest.raises(PoleAtPoint):
        eval_expr(inv(z(1)), (0j,))


# -- zero testing ----------------------------------------------------------

def test_is_zero_verdicts():
    assert is_zero(z(1) - z(1)).kind == "ExactZero"
    v = is_zero(z(1), seed=4)
    assert v.kind == "NonZero" and v.witness is not None
    assert not v


def test_is_zero_on_restricted_domain():
    e = parse("sqrt(y2^2) - y2")
    v = is_zero(e, n=2, domain=lambda p: p[1].imag > 0)
    assert v.kind == "ProbablyZero"
    assert not is_zero(e, n=2, domain=lambda p: p[1].imag < 0)


def test_is_zero_witness_has_requested_dimension():
    v = is_zero(z(1) + 1, n=3)
    assert len(v.witness) == 3


def test_is_zero_rejects_bad_trials():
    with pytest.raises(ValueError):
        is_zero(z(1), trials=0)


def test_is_zero_seeded():
    e = parse("sqrt(2 + y1^2) - 1")
    assert is_zero(e, seed=7) == is_zero(e, seed=7)


# -- property suite on seeded random rational expressions -------------------

@PROPS
@given(rational_exprs)
def test_conj_commutes_with_derivative(e):
    for j in (1, 2):
        assert same(conj(wirtinger_d(e, zvar(j))), wirtinger_d(conj(e), zbarvar(j)))


@PROPS
@given(rational_exprs)
def test_mixed_derivatives_commute(e):
    a = wirtinger_d(wirtinger_d(e, zvar(1)), zbarvar(2))
    b = wirtinger_d(wirtinger_d(e, zbarvar(2)), zvar(1))
    assert same(a, b)


@PROPS
@given(rational_exprs)
def test_conj_is_involution(e):
    assert same(conj(conj(e)), e)


@PROPS
@given(rational_exprs)
def test_parser_round_trip(e):
    assert same(parse(to_text(e)), e)


@PROPS
@given(rational_exprs)
def test_eval_matches_normal_form(e):
    rf = normalize_rational(e)
    p = (0.31 - 0.12j, -0.2 + 0.27j)
    lookup = lambda v: p[v // 2] if v % 2 == 0 else p[v // 2].conjugate()
    got, want = eval_expr(e, p), rf.evaluate(lookup)
    assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


@PROPS
@given(rational_exprs)
def test_derivative_matches_finite_difference(e):
    d = wirtinger_d(e, zbarvar(1))
    p = np.array([0.21 + 0.1j, -0.15 + 0.05j])
    fd = fd_wirtinger(lambda q: eval_expr(e, q), p, 1, True)
    exact = eval_expr(d, p)
    assert abs(exact - fd) <= 1e-6 * max(1.0, abs(exact))


def test_has_sqrt():
    assert has_sqrt(parse("1 + sqrt(2 + y1^2)"))
    assert not has_sqrt(parse("z1/(1 + zbar1)"))
