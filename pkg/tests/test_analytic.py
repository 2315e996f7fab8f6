import math

import numpy as np
import pytest

from fracsph.analytic import (
    adaptive_quad,
    analytic_reference,
    covers,
    dual_oracle_gate,
    gamma_fn,
    hyp1f2,
    hyp2f1,
    quadrature_oracle,
    upper_incomplete_gamma,
)
from fracsph.errors import ConvergenceError, PoleError, UnsupportedError
from fracsph.fracops import Operator, OrderSpec
from fracsph.functions import PRESETS, from_expression, preset

CO = OrderSpec.constant(0.75)
VO = OrderSpec.variable("0.5 + 0.3*sin(4*pi*x)")

# frozen from 30-digit mpmath runs; Gamma(0.25, 1) also matches direct quadrature
GAMMA_025_1 = 0.24625552919349870887
HYP1F2_CAPUTO_SIN = -0.64356530827434225296
CAPUTO_EXP_AT_1 = 2.5336530495475984822


def test_gamma_examples():
    assert gamma_fn(1.0).value == 1.0
    assert gamma_fn(0.5).value == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma_fn(1.75).value == pytest.approx(0.919063, abs=1e-6)
    assert gamma_fn(1.75).value == pytest.approx(0.75 * gamma_fn(0.75).value, rel=1e-14)


@pytest.mark.parametrize("nu", [0.0, -1.0, -7.0])
def test_gamma_poles(nu):
    with pytest.raises(PoleError):
        gamma_fn(nu)


def test_gamma_recurrence(rng):
    for nu in rng.uniform(0.1, 10.0, 1000):
        assert gamma_fn(nu + 1).value == pytest.approx(nu * gamma_fn(nu).value, rel=1e-12)


def test_gamma_error_estimate_non_negative():
    assert gamma_fn(3.3).est_error >= 0


def test_incomplete_gamma_examples():
    assert upper_incomplete_gamma(1.0, 0.0).value == 1.0
    assert upper_incomplete_gamma(1.0, 2.0).value == pytest.approx(math.exp(-2.0), rel=1e-14)
    assert upper_incomplete_gamma(0.25, 1.0).value == pytest.approx(GAMMA_025_1, rel=1e-13)


def test_incomplete_gamma_pinned_by_quadrature():
    tail, _ = adaptive_quad(lambda t: t**-0.75 * np.exp(-t), 1.0, 60.0, tol=1e-14)
    assert upper_incomplete_gamma(0.25, 1.0).value == pytest.approx(tail, rel=1e-12)


@pytest.mark.parametrize(
    "nu,z,expected",
    [(-0.75, 2.0, 0.023731339995251629045), (0.0, 0.5, 0.55977359477616081175), (-2.0, 3.0, 9.9229406178030281966e-4)],
)
def test_incomplete_gamma_non_positive_orders(nu, z, expected):
    assert upper_incomplete_gamma(nu, z).value == pytest.approx(expected, rel=1e-11)


@pytest.mark.parametrize("nu", [0.25, 0.5, 1.5, 3.7])
def test_incomplete_gamma_at_zero(nu):
    assert upper_incomplete_gamma(nu, 0.0).value == pytest.approx(gamma_fn(nu).value, rel=1e-10)


def test_incomplete_gamma_branches_agree():
    # series below nu + 1, continued fraction above
    for nu in (0.25, 0.9, 2.5):
        z = nu + 1.0
        below = upper_incomplete_gamma(nu, z * (1 - 1e-12)).value
        above = upper_incomplete_gamma(nu, z * (1 + 1e-12)).value
        assert below == pytest.approx(above, rel=1e-10)


def test_incomplete_gamma_bad_input():
    with pytest.raises(ValueError):
        upper_incomplete_gamma(0.5, -1.0)
    with pytest.raises(PoleError):
        upper_incomplete_gamma(-0.5, 0.0)


def test_hyp1f2_examples():
    assert hyp1f2(0.3, 0.6, 1.2, 0.0).value == 1.0
    # a1 = b1 cancels down to 0F1(1.5; -2)
    assert hyp1f2(0.7, 0.7, 1.5, -2.0).value == pytest.approx(0.10891980905843206345, rel=1e-13)
    assert hyp1f2(1.0, 0.625, 1.125, -math.pi**2 / 4).value == pytest.approx(HYP1F2_CAPUTO_SIN, rel=1e-12)


def test_hyp1f2_against_caputo_quadrature():
    series = math.pi / math.gamma(1.25) * hyp1f2(1.0, 0.625, 1.125, -math.pi**2 / 4).value
    quad = quadrature_oracle(preset("sin_pi_x"), Operator.CAPUTO, CO, 1.0)
    assert series == pytest.approx(quad, abs=1e-9)


def test_hyp1f2_pole():
    with pytest.raises(PoleError):
        hyp1f2(1.0, -2.0, 0.5, 0.3)


def test_hyp2f1_examples():
    assert hyp2f1(0.3, 0.2, 1.4, 0.0).value == 1.0
    assert hyp2f1(1.0, -2.0, 1.25, 0.5).value == pytest.approx(17 / 45, rel=1e-15)
    assert hyp2f1(1.0, 0.0, 1.25, 7.0).value == 1.0
    assert hyp2f1(0.3, 0.7, 1.9, 0.8).value == pytest.approx(1.1407258143087786689, rel=1e-12)
    # terminating series is fine outside the unit disc
    assert hyp2f1(1.0, -2.0, 1.25, 3.0).value == pytest.approx(1 - 2 * 3 / 1.25 + 4 * 9 / (1.25 * 2.25 * 2), rel=1e-14)


def test_hyp2f1_unsupported_region():
    with pytest.raises(UnsupportedError):
        hyp2f1(0.3, 0.7, 1.9, 1.2)


def test_series_error_estimate_bounds_longer_sum():
    # truncating after half the terms must sit within the reported bound of the full sum
    full = hyp1f2(1.0, 0.625, 1.125, -40.0)
    terms, term = [1.0], 1.0
    for k in range(200):
        term *= (1.0 + k) / ((0.625 + k) * (1.125 + k) * (k + 1)) * -40.0
        terms.append(term)
    assert abs(math.fsum(terms) - full.value) <= max(full.est_error, 1e-15)


def test_analytic_examples():
    cubic = preset("shifted_cubic")
    assert analytic_reference(cubic, Operator.CAPUTO, CO, 0.0) == 0.0
    exp = preset("exp_x")
    assert analytic_reference(exp, Operator.CAPUTO, CO, 1.0) == pytest.approx(CAPUTO_EXP_AT_1, rel=1e-12)
    assert CAPUTO_EXP_AT_1 == pytest.approx(math.e * (1 - GAMMA_025_1 / math.gamma(0.25)), rel=1e-15)


def test_vo_rl_integral_matches_quadrature():
    sin = preset("sin_pi_x")
    for x in (0.3, 1.125, 2.9, 4.6):
        ref = analytic_reference(sin, Operator.RL_INTEGRAL, VO, x)
        assert ref == pytest.approx(quadrature_oracle(sin, Operator.RL_INTEGRAL, VO, x), abs=1e-8)


def test_uncovered_cases_raise():
    assert not covers(preset("sin_pi_x"), Operator.RL_DERIVATIVE, VO)
    with pytest.raises(UnsupportedError):
        analytic_reference(preset("sin_pi_x"), Operator.RL_DERIVATIVE, VO, 1.0)
    with pytest.raises(UnsupportedError):
        analytic_reference(from_expression("x^2"), Operator.CAPUTO, CO, 1.0)


def test_quadrature_examples():
    one = from_expression("1")
    assert quadrature_oracle(one, Operator.RL_INTEGRAL, CO, 1.0) == pytest.approx(1 / math.gamma(1.75), abs=1e-10)
    assert quadrature_oracle(one, Operator.RL_INTEGRAL, CO, 0.0) == 0.0
    assert quadrature_oracle(one, Operator.RL_DERIVATIVE, CO, 1.0) == pytest.approx(1 / math.gamma(0.25), abs=1e-8)
    assert quadrature_oracle(one, Operator.RL_DERIVATIVE, CO, 0.0) == math.inf
    x = from_expression("x")
    assert quadrature_oracle(x, Operator.CAPUTO, CO, 1.0) == pytest.approx(1 / math.gamma(1.25), abs=1e-10)


def test_quadrature_below_lower_bound():
    with pytest.raises(ValueError):
        quadrature_oracle(preset("exp_x"), Operator.CAPUTO, CO, -0.5)


def test_adaptive_quad_convergence_error():
    with pytest.raises(ConvergenceError) as info:
        adaptive_quad(lambda t: np.sin(1.0 / np.maximum(t, 1e-300)), 0.0, 1.0, tol=1e-14, max_intervals=50)
    assert info.value.iterations > 0


def test_adaptive_quad_polynomial_exact():
    value, err = adaptive_quad(lambda t: t**5 - 3 * t, -1.0, 2.0)
    assert value == pytest.approx(2**6 / 6 - 1 / 6 - 1.5 * 3, rel=1e-14)
    assert err >= 0


def test_dual_oracle_gate_constant_order():
    functions = [preset(name) for name in sorted(PRESETS)]
    records = dual_oracle_gate(functions, list(Operator), [CO])
    assert len(records) == 12
    worst = max(r.max_abs_diff for r in records)
    assert all(r.passed for r in records), worst


def test_dual_oracle_gate_variable_order():
    functions = [preset(name) for name in sorted(PRESETS)]
    records = dual_oracle_gate(functions, [Operator.RL_INTEGRAL, Operator.CAPUTO], [VO])
    assert len(records) == 8
    assert all(r.passed for r in records)
