"""Test functions with known derivatives.

The four preset families (``sin``, ``cos``, ``exp`` in ``beta*x``, and the
shifted power ``(x + beta)^n``) carry closed-form fractional operators.
Functions built from expressions get their derivatives from 5-point
central differences, which is enough for oracle use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from fracsph import expr as _expr

__all__ = ["PRESETS", "TestFunction", "from_expression", "preset"]


@dataclass(frozen=True)
class TestFunction:
    name: str
    value: Callable = field(repr=False)
    derivative: Callable = field(repr=False)
    second_derivative: Callable = field(repr=False)
    #: closed-form family ("sin", "cos", "exp", "shifted_power") or None
    family: Optional[str] = None
    beta: float = 1.0
    power: int = 0
    source: Optional[str] = None

    __test__ = False  # keep pytest from collecting this class

    def __call__(self, x):
        return self.value(x)


def _sin(beta):
    return TestFunction(
        f"sin({beta!r}*x)",
        lambda x: np.sin(beta * np.asarray(x, float)),
        lambda x: beta * np.cos(beta * np.asarray(x, float)),
        lambda x: -beta * beta * np.sin(beta * np.asarray(x, float)),
        family="sin",
        beta=beta,
    )


def _cos(beta):
    return TestFunction(
        f"cos({beta!r}*x)",
        lambda x: np.cos(beta * np.asarray(x, float)),
        lambda x: -beta * np.sin(beta * np.asarray(x, float)),
        lambda x: -beta * beta * np.cos(beta * np.asarray(x, float)),
        family="cos",
        beta=beta,
    )


def _exp(beta):
    return TestFunction(
        f"exp({beta!r}*x)",
        lambda x: np.exp(beta * np.asarray(x, float)),
        lambda x: beta * np.exp(beta * np.asarray(x, float)),
        lambda x: beta * beta * np.exp(beta * np.asarray(x, float)),
        family="exp",
        beta=beta,
    )


def _shifted_power(beta, n):
    def d(k):
        coef = math.perm(n, k)
        if k > n:
            return lambda x: np.zeros_like(np.asarray(x, float))
        return lambda x: coef * (np.asarray(x, float) + beta) ** (n - k)

    return TestFunction(
        f"(x + {beta!r})^{n}",
        d(0),
        d(1),
        d(2),
        family="shifted_power",
        beta=beta,
        power=n,
    )


PRESETS = {
    "sin_pi_x": lambda: _sin(math.pi),
    "cos_pi_x": lambda: _cos(math.pi),
    "exp_x": lambda: _exp(1.0),
    "shifted_cubic": lambda: _shifted_power(-1.0, 3),
}


def preset(name: str) -> TestFunction:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown function preset {name!r}; choose from {sorted(PRESETS)}") from None


def family(kind: str, beta: float = 1.0, n: int = 0) -> TestFunction:
    """Closed-form family member, e.g. ``family("sin", 2.0)`` for ``sin(2x)``."""
    if kind == "sin":
        return _sin(beta)
    if kind == "cos":
        return _cos(beta)
    if kind == "exp":
        return _exp(beta)
    if kind == "shifted_power":
        return _shifted_power(beta, n)
    raise KeyError(f"unknown function family {kind!r}")


def from_expression(src: str, step: float = 1e-3) -> TestFunction:
    """Wrap an expression; derivatives use 5-point central differences."""
    tree = _expr.parse(src)

    def f(x):
        return _expr.evaluate(tree, x)

    def df(x):
        x = np.asarray(x, float)
        return (f(x - 2 * step) - 8 * f(x - step) + 8 * f(x + step) - f(x + 2 * step)) / (12 * step)

    def d2f(x):
        x = np.asarray(x, float)
        return (
            -f(x - 2 * step) + 16 * f(x - step) - 30 * f(x) + 16 * f(x + step) - f(x + 2 * step)
        ) / (12 * step * step)

    return TestFunction(_expr.to_source(tree), f, df, d2f, source=src)
