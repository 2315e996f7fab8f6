import math

import numpy as np
import pytest

from fracsph.functions import PRESETS, family, from_expression, preset


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_preset_derivatives_match_differences(name):
    fn = preset(name)
    x = np.linspace(0.1, 4.9, 50)
    step = 1e-4
    fd1 = (fn(x + step) - fn(x - step)) / (2 * step)
    fd2 = (fn.derivative(x + step) - fn.derivative(x - step)) / (2 * step)
    np.testing.assert_allclose(fn.derivative(x), fd1, rtol=1e-6, atol=1e-6)
    np.testing.assert_allclose(fn.second_derivative(x), fd2, rtol=1e-6, atol=1e-6)


def test_preset_metadata():
    assert preset("sin_pi_x").family == "sin"
    assert preset("sin_pi_x").beta == math.pi
    cubic = preset("shifted_cubic")
    assert (cubic.family, cubic.beta, cubic.power) == ("shifted_power", -1.0, 3)
    assert cubic(3.0) == 8.0


def test_unknown_preset():
    with pytest.raises(KeyError):
        preset("tan_x")
    with pytest.raises(KeyError):
        family("log")


def test_family_members():
    assert family("exp", 2.0)(1.0) == pytest.approx(math.exp(2.0))
    assert family("shifted_power", 0.5, 2).second_derivative(7.0) == 2.0


def test_expression_function():
    fn = from_expression("x^3")
    assert fn.family is None
    assert fn(2.0) == 8.0
    assert fn.derivative(2.0) == pytest.approx(12.0, rel=1e-10)
    assert fn.second_derivative(2.0) == pytest.approx(12.0, rel=1e-6)


def test_expression_constant_has_zero_derivatives():
    fn = from_expression("1")
    x = np.linspace(0, 5, 11)
    assert np.all(fn.derivative(x) == 0.0)
    assert np.all(fn.second_derivative(x) == 0.0)
