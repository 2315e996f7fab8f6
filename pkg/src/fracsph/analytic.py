"""Reference values for fractional operators.

Two independent routes:

* :func:`analytic_reference` -- closed forms through Gamma, upper incomplete
  Gamma, 1F2 and 2F1 (lower bound ``a = 0``).  For Type-I variable order the
  constant-order formulas hold with ``alpha`` replaced by ``alpha(x)``,
  except for the RL derivative.
* :func:`quadrature_oracle` -- the defining integrals after the substitution
  ``t = (x - x')^p``, which removes the endpoint singularity, integrated by
  adaptive Gauss-Kronrod bisection.

:func:`dual_oracle_gate` compares the two.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np

from fracsph.errors import ConvergenceError, PoleError, UnsupportedError
from fracsph.fracops import Operator, OrderSpec

__all__ = [
    "GateRecord",
    "SpecialValue",
    "adaptive_quad",
    "analytic_reference",
    "dual_oracle_gate",
    "gamma_fn",
    "hyp1f2",
    "hyp2f1",
    "quadrature_oracle",
    "reference_values",
    "upper_incomplete_gamma",
]

EPS = sys.float_info.epsilon
MAX_TERMS = 10_000
SERIES_RTOL = 1e-15


@dataclass(frozen=True)
class SpecialValue:
    value: float
    est_error: float = 0.0

    def __float__(self) -> float:
        return self.value


def _is_nonpositive_int(v: float) -> bool:
    return v <= 0 and v == math.floor(v)


def gamma_fn(nu: float) -> SpecialValue:
    """Gamma function; raises :class:`PoleError` at 0, -1, -2, ..."""
    if _is_nonpositive_int(nu):
        raise PoleError(f"Gamma has a pole at {nu!r}")
    value = math.gamma(nu)
    return SpecialValue(value, 4 * EPS * abs(value))


def _lower_series(nu, z):
    # gamma(nu, z) = z^nu e^-z sum_k z^k / (nu (nu+1) ... (nu+k))
    term = 1.0 / nu
    total = term
    for k in range(1, MAX_TERMS):
        term *= z / (nu + k)
        total += term
        if abs(term) < SERIES_RTOL * abs(total):
            return total * math.exp(-z + nu * math.log(z)), k
    raise ConvergenceError("incomplete gamma series did not converge", MAX_TERMS)


def _upper_fraction(nu, z):
    # modified Lentz evaluation of the Legendre continued fraction
    tiny = 1e-300
    b = z + 1.0 - nu
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, MAX_TERMS):
        an = -i * (i - nu)
        b += 2.0
        d = an * d + b
        d = tiny if abs(d) < tiny else d
        c = b + an / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < SERIES_RTOL:
            return h * math.exp(-z + nu * math.log(z)), i
    raise ConvergenceError("incomplete gamma continued fraction did not converge", MAX_TERMS)


def _expint_e1(z):
    # E1(z) = -euler_gamma - ln z - sum_{k>=1} (-z)^k / (k k!)
    total = 0.0
    term = 1.0
    for k in range(1, MAX_TERMS):
        term *= -z / k
        total += term / k
        if abs(term / k) < SERIES_RTOL * max(abs(total), 1.0):
            return -0.5772156649015329 - math.log(z) - total, k
    raise ConvergenceError("E1 series did not converge", MAX_TERMS)


def upper_incomplete_gamma(nu: float, z: float) -> SpecialValue:
    """Upper incomplete Gamma ``Gamma(nu, z) = int_z^inf t^(nu-1) e^-t dt``."""
    if z < 0:
        raise ValueError(f"upper incomplete gamma needs z >= 0, got {z!r}")
    if z == 0.0:
        if nu <= 0:
            raise PoleError(f"Gamma({nu!r}, 0) diverges")
        return gamma_fn(nu)
    if nu > 0:
        if z < nu + 1.0:
            lower, _ = _lower_series(nu, z)
            value = math.gamma(nu) - lower
            return SpecialValue(value, 8 * EPS * (math.gamma(nu) + abs(lower)))
        value, _ = _upper_fraction(nu, z)
        return SpecialValue(value, 8 * EPS * abs(value))
    # climb to a positive order, then recur down:
    # Gamma(v, z) = (Gamma(v+1, z) - z^v e^-z) / v
    steps = math.floor(-nu) + 1
    start = nu + steps
    if start == 1.0 and _is_nonpositive_int(nu):
        start -= 1.0
        steps -= 1
        value = _expint_e1(z)[0] if z < 1.0 else _upper_fraction(0.0, z)[0]
    else:
        value = upper_incomplete_gamma(start, z).value
    v = start
    for _ in range(steps):
        v -= 1.0
        value = (value - math.exp(-z + v * math.log(z))) / v
    return SpecialValue(value, 16 * EPS * (abs(value) + math.exp(-z + nu * math.log(z))))


def _hypergeometric(upper, lower, z, terminating):
    for b in lower:
        if _is_nonpositive_int(b):
            raise PoleError(f"lower hypergeometric parameter {b!r} is a pole")
    terms = [1.0]
    term = 1.0
    small = 0
    for k in range(MAX_TERMS):
        num = math.prod(a + k for a in upper)
        den = math.prod(b + k for b in lower) * (k + 1)
        term *= num / den * z
        terms.append(term)
        if term == 0.0 and terminating:
            break
        total = math.fsum(terms)
        if abs(term) < SERIES_RTOL * abs(total):
            small += 1
            if small == 3:
                break
        else:
            small = 0
    else:
        raise ConvergenceError("hypergeometric series did not converge", MAX_TERMS)
    biggest = max(abs(t) for t in terms)
    tail = 0.0 if terminating else 10.0 * abs(terms[-1])
    return SpecialValue(math.fsum(terms), tail + len(terms) * EPS * biggest)


def hyp1f2(a1: float, b1: float, b2: float, z: float) -> SpecialValue:
    """Generalised hypergeometric 1F2 by term-wise summation (entire in z)."""
    return _hypergeometric((a1,), (b1, b2), z, _is_nonpositive_int(a1))


def hyp2f1(a: float, b: float, c: float, z: float) -> SpecialValue:
    """Gauss 2F1: terminating series, or the power series inside ``|z| < 1``."""
    terminating = _is_nonpositive_int(a) or _is_nonpositive_int(b)
    if not terminating and abs(z) >= 1.0:
        raise UnsupportedError(f"2F1 series diverges at z={z!r} and does not terminate")
    return _hypergeometric((a, b), (c,), z, terminating)


def _g(v):
    return gamma_fn(v).value


def _rl_closed(fn, alpha, x):
    """RL derivative of order ``alpha`` (negative ``alpha`` gives the integral)."""
    beta = fn.beta
    fam = fn.family
    if x == 0.0:
        at_zero = float(fn.value(0.0))
        if alpha > 0 and at_zero != 0.0:
            return math.copysign(math.inf, at_zero)
        return 0.0
    if fam == "sin":
        pref = beta * x ** (1 - alpha) * 2 ** (alpha - 1) * math.sqrt(math.pi)
        pref /= _g(1 - alpha / 2) * _g(1.5 - alpha / 2)
        return pref * hyp1f2(1, 1 - alpha / 2, 1.5 - alpha / 2, -((beta * x) ** 2) / 4).value
    if fam == "cos":
        pref = x ** (-alpha) * 2**alpha * math.sqrt(math.pi)
        pref /= _g(0.5 - alpha / 2) * _g(1 - alpha / 2)
        return pref * hyp1f2(1, 0.5 - alpha / 2, 1 - alpha / 2, -((beta * x) ** 2) / 4).value
    if fam == "exp":
        if beta <= 0:
            raise UnsupportedError("closed form for exp(beta x) needs beta > 0")
        ratio = upper_incomplete_gamma(-alpha, beta * x).value / _g(-alpha)
        return beta**alpha * math.exp(beta * x) * (1.0 - ratio)
    if fam == "shifted_power":
        n = fn.power
        if beta == 0:
            raise UnsupportedError("closed form for (x + beta)^n needs beta != 0")
        # (beta + x)^n ((beta + x)/beta)^-n simplifies to beta^n
        pref = beta**n * x ** (-alpha) / _g(1 - alpha)
        return pref * hyp2f1(1, -n, 1 - alpha, -x / beta).value
    raise UnsupportedError(f"no closed form for {fn.name}")


def _caputo_closed(fn, alpha, x):
    beta = fn.beta
    fam = fn.family
    if x == 0.0:
        return 0.0
    if fam == "sin":
        pref = beta * x ** (1 - alpha) / _g(2 - alpha)
        return pref * hyp1f2(1, 1 - alpha / 2, 1.5 - alpha / 2, -((beta * x) ** 2) / 4).value
    if fam == "cos":
        pref = -(beta**2) * x ** (2 - alpha) / _g(3 - alpha)
        return pref * hyp1f2(1, 1.5 - alpha / 2, 2 - alpha / 2, -((beta * x) ** 2) / 4).value
    if fam == "exp":
        if beta <= 0:
            raise UnsupportedError("closed form for exp(beta x) needs beta > 0")
        ratio = upper_incomplete_gamma(1 - alpha, beta * x).value / _g(1 - alpha)
        return beta**alpha * math.exp(beta * x) * (1.0 - ratio)
    if fam == "shifted_power":
        n = fn.power
        if n == 0:
            return 0.0
        if beta == 0:
            raise UnsupportedError("closed form for (x + beta)^n needs beta != 0")
        pref = beta ** (n - 1) * x ** (1 - alpha) * n / _g(2 - alpha)
        return pref * hyp2f1(1, 1 - n, 2 - alpha, -x / beta).value
    raise UnsupportedError(f"no closed form for {fn.name}")


def analytic_reference(fn, operator, order: OrderSpec, x: float, lower_bound: float = 0.0) -> float:
    """Closed-form value of ``operator`` applied to ``fn`` at ``x``.

    Raises :class:`UnsupportedError` when no closed form applies: unknown
    function family, nonzero lower bound, or a variable-order RL derivative.
    """
    operator = Operator(operator)
    if fn.family is None:
        raise UnsupportedError(f"{fn.name} has no closed-form family")
    if lower_bound != 0.0:
        raise UnsupportedError("closed forms assume the lower bound a = 0")
    if x < 0:
        raise ValueError(f"closed forms need x >= a = 0, got {x!r}")
    if operator is Operator.RL_DERIVATIVE and not order.is_uniform:
        raise UnsupportedError("no closed form for the variable-order RL derivative")
    alpha = float(order.check(x)[0])
    if operator is Operator.CAPUTO:
        return _caputo_closed(fn, alpha, x)
    if operator is Operator.RL_DERIVATIVE:
        return _rl_closed(fn, alpha, x)
    return _rl_closed(fn, -alpha, x)


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KWEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(g, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    vals = np.asarray(g(mid + half * _NODES), dtype=float)
    kronrod = half * float(_KWEIGHTS @ vals)
    gauss = half * float(_GWEIGHTS @ vals)
    return kronrod, abs(kronrod - gauss)


def adaptive_quad(g: Callable, lo: float, hi: float, tol: float = 1e-10, max_intervals: int = 20_000):
    """Globally adaptive G7/K15 bisection to absolute tolerance ``tol``.

    ``g`` must accept an array of nodes.  Returns ``(value, error_estimate)``.
    """
    if hi == lo:
        return 0.0, 0.0
    value, err = _gk15(g, lo, hi)
    pieces = [(err, lo, hi, value)]
    total_err = err
    count = 1
    while total_err > tol:
        if count >= max_intervals:
            raise ConvergenceError(f"quadrature error {total_err:.3g} above tolerance {tol:g}", count)
        # bisect the interval with the largest error
        k = max(range(len(pieces)), key=lambda i: pieces[i][0])
        e, a, b, _ = pieces.pop(k)
        m = 0.5 * (a + b)
        if not a < m < b:
            raise ConvergenceError("interval cannot be bisected further", count)
        left = _gk15(g, a, m)
        right = _gk15(g, m, b)
        pieces.append((left[1], a, m, left[0]))
        pieces.append((right[1], m, b, right[0]))
        total_err = sum(p[0] for p in pieces)
        count += 1
    return math.fsum(p[3] for p in pieces), total_err


def _power_integral(g, x, a, p, tol):
    """``int_a^x (x - x')^(p-1) g(x') dx'`` after substituting ``t = (x - x')^p``."""
    if x <= a:
        return 0.0
    top = (x - a) ** p
    value, _ = adaptive_quad(lambda t: g(x - t ** (1.0 / p)), 0.0, top, tol=tol * p)
    return value / p


def _rl_integral_quad(fn, order, x, a, tol):
    alpha = float(order.check(x)[0])
    return _power_integral(fn.value, x, a, alpha, tol) / math.gamma(alpha)


def quadrature_oracle(fn, operator, order: OrderSpec, x: float, lower_bound: float = 0.0,
                      span: float = 1.0, tol: float = 1e-10) -> float:
    """Brute-force value of ``operator`` applied to ``fn`` at ``x``.

    The RL derivative differentiates the inner integral ``I^{1-alpha(y)} f(y)``
    with a 5-point central stencil of step ``1e-4 * span`` (shrunk near the
    lower bound so the stencil stays inside the domain).
    """
    operator = Operator(operator)
    a = lower_bound
    if x < a:
        raise ValueError(f"x={x!r} lies below the lower bound {a!r}")
    if operator is Operator.RL_INTEGRAL:
        return _rl_integral_quad(fn, order, x, a, tol)
    if operator is Operator.CAPUTO:
        alpha = float(order.check(x)[0])
        q = 1.0 - alpha
        return _power_integral(fn.derivative, x, a, q, tol) / math.gamma(q)

    if x == a:
        at_a = float(fn.value(a))
        return 0.0 if at_a == 0.0 else math.copysign(math.inf, at_a)

    def inner(y):
        alpha = float(order.check(y)[0])
        q = 1.0 - alpha
        return _power_integral(fn.value, y, a, q, tol * 1e-3) / math.gamma(q)

    step = min(1e-4 * span, (x - a) / 2.5)
    return (inner(x - 2 * step) - 8 * inner(x - step) + 8 * inner(x + step) - inner(x + 2 * step)) / (
        12 * step
    )


def reference_values(fn, operator, order, xs, lower_bound=0.0, mode="analytic", span=1.0):
    """Reference field at ``xs``; ``mode`` is ``analytic`` or ``quadrature``."""
    xs = np.asarray(xs, dtype=float)
    if mode == "analytic":
        return np.array([analytic_reference(fn, operator, order, float(x), lower_bound) for x in xs])
    if mode == "quadrature":
        return np.array(
            [quadrature_oracle(fn, operator, order, float(x), lower_bound, span=span) for x in xs]
        )
    raise ValueError(f"unknown reference mode {mode!r}")


def covers(fn, operator, order, lower_bound=0.0) -> bool:
    """Whether :func:`analytic_reference` has a closed form for this case."""
    operator = Operator(operator)
    if fn.family is None or lower_bound != 0.0:
        return False
    if fn.family == "exp" and fn.beta <= 0:
        return False
    if fn.family == "shifted_power" and fn.beta == 0:
        return False
    return not (operator is Operator.RL_DERIVATIVE and not order.is_uniform)


@dataclass(frozen=True)
class GateRecord:
    function: str
    operator: str
    order: dict
    max_abs_diff: float
    n_compared: int
    passed: bool


def dual_oracle_gate(functions, operators, orders, a=0.0, b=5.0, n_points=21, tol=1e-7):
    """Compare both oracles on ``n_points`` equally spaced points of ``[a, b]``.

    Points where the exact operator is unbounded are skipped.  Combinations
    without a closed form are not gated.
    """
    xs = np.linspace(a, b, n_points)
    records = []
    for fn in functions:
        for op in operators:
            for order in orders:
                if not covers(fn, op, order, a):
                    continue
                ref = reference_values(fn, op, order, xs, a, "analytic")
                finite = np.isfinite(ref)
                quad = reference_values(fn, op, order, xs[finite], a, "quadrature", span=b - a)
                diff = float(np.max(np.abs(quad - ref[finite]))) if quad.size else 0.0
                records.append(
                    GateRecord(fn.name, Operator(op).value, order.describe(), diff,
                               int(finite.sum()), diff < tol)
                )
    return records
