"""SPH approximation of left-handed fractional operators on a particle domain.

Three operators (Riemann-Liouville integral, Riemann-Liouville derivative,
Caputo derivative) of constant order or Type-I variable order ``alpha(x)``,
with ``0 < alpha < 1``.  Each can be evaluated in the original singular
form or in the integrated-by-parts (non-singular) form, and the
fractional integral can run over the real particles or over the midpoint
(auxiliary) particles.

All integrals are SPH sums over *source* particles strictly to the left of
the evaluation point, weighted by the cumulative kernel (see
:class:`fracsph.sph.Window`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from fracsph import expr as _expr
from fracsph.domain import AuxiliaryParticles, ParticleDomain1D, auxiliary_particles
from fracsph.errors import OrderRangeError
from fracsph.kernel import cumulative_weight
from fracsph.sph import (
    Window,
    _check_samples,
    brookshaw_second_derivative,
    correction_factors,
    corrected_gradient,
)

__all__ = [
    "AuxValues",
    "Formulation",
    "Integration",
    "Operator",
    "OperatorField",
    "OperatorRequest",
    "OrderSpec",
    "apply_operator",
    "caputo_derivative",
    "rl_derivative",
    "rl_integral",
]

#: bases below this are dropped from power-law sums
_TINY_BASE = 1e-300
#: number of samples used to check a variable order on [a, b]
ORDER_CHECK_SAMPLES = 10_000


class Operator(str, enum.Enum):
    RL_INTEGRAL = "rl_integral"
    RL_DERIVATIVE = "rl_derivative"
    CAPUTO = "caputo"


class Formulation(str, enum.Enum):
    STANDARD = "standard"
    NONSINGULAR = "nonsingular"


class Integration(str, enum.Enum):
    STANDARD = "standard"
    AUXILIARY = "auxiliary"


class AuxValues(str, enum.Enum):
    """Field values at auxiliary particles: parent average or exact function."""

    AVERAGE = "average"
    EXACT = "exact"


@dataclass(frozen=True)
class OrderSpec:
    """Constant order ``alpha`` or Type-I variable order ``alpha(x)``."""

    alpha: Optional[float] = None
    expression: Optional[_expr.Expr] = None
    source: Optional[str] = None

    def __post_init__(self):
        if (self.alpha is None) == (self.expression is None):
            raise ValueError("give exactly one of a constant alpha or an order expression")
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise OrderRangeError(f"constant order must lie in (0, 1), got {self.alpha!r}")

    @classmethod
    def constant(cls, alpha: float) -> "OrderSpec":
        return cls(alpha=float(alpha))

    @classmethod
    def variable(cls, src: str) -> "OrderSpec":
        return cls(expression=_expr.parse(src), source=src)

    @property
    def kind(self) -> str:
        return "constant" if self.alpha is not None else "variable"

    @property
    def n(self) -> int:
        return 1

    @property
    def is_uniform(self) -> bool:
        """True when the order does not depend on ``x``."""
        return self.alpha is not None or _expr.is_constant(self.expression)

    def at(self, x):
        if self.alpha is not None:
            return self.alpha if np.ndim(x) == 0 else np.full(np.shape(x), self.alpha)
        return _expr.evaluate(self.expression, x)

    def check(self, x) -> np.ndarray:
        """Order values at ``x``; raises if any leaves ``(0, 1)``."""
        alpha = np.atleast_1d(np.asarray(self.at(x), dtype=float))
        bad = ~((alpha > 0.0) & (alpha < 1.0))
        if np.any(bad):
            where = np.atleast_1d(np.asarray(x, dtype=float))
            where = np.broadcast_to(where, alpha.shape)[bad][0]
            value = alpha[bad][0]
            raise OrderRangeError(f"order {value!r} at x={where!r} is outside (0, 1)")
        return alpha

    def validate(self, a: float, b: float) -> None:
        if self.alpha is None:
            self.check(np.linspace(a, b, ORDER_CHECK_SAMPLES))

    def describe(self) -> dict:
        if self.alpha is not None:
            return {"constant": self.alpha}
        return {"variable": self.source or _expr.to_source(self.expression)}


@dataclass(frozen=True)
class OperatorRequest:
    operator: Operator
    order: OrderSpec
    lower_bound: float = 0.0
    formulation: Formulation = Formulation.NONSINGULAR
    integration: Integration = Integration.STANDARD
    window: Window = Window.OPEN
    aux_values: AuxValues = AuxValues.AVERAGE
    #: use the Bonet-Lok corrected kernel gradient in derivatives
    corrected: bool = True
    #: Brookshaw regulariser; ``None`` selects ``0.01 h``
    eta: Optional[float] = None

    def __post_init__(self):
        for name, enum_type in (
            ("operator", Operator),
            ("formulation", Formulation),
            ("integration", Integration),
            ("window", Window),
            ("aux_values", AuxValues),
        ):
            object.__setattr__(self, name, enum_type(getattr(self, name)))

    def with_(self, **changes) -> "OperatorRequest":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class OperatorField:
    """Operator values at the real particles.

    ``singular`` flags particles where the exact operator is unbounded
    (RL derivative at ``x = a`` with ``f(a) != 0``); their value is NaN.
    """

    positions: np.ndarray
    values: np.ndarray
    request: OperatorRequest
    singular: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.singular is None:
            object.__setattr__(self, "singular", np.zeros(len(self.values), dtype=bool))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class _Sources:
    x: np.ndarray
    volumes: np.ndarray
    # maps a field sampled on all particles to values at the sources
    take: object


def _sources(d: ParticleDomain1D, req: OperatorRequest, aux: Optional[AuxiliaryParticles], exact):
    if req.integration is Integration.AUXILIARY:
        if aux is None:
            aux = auxiliary_particles(d, include_virtual=req.window is Window.BOUNDED)
        chain = slice(None) if len(aux) == d.n_total - 1 else d.real

        def take(values, kind):
            if req.aux_values is AuxValues.EXACT:
                if exact is None:
                    raise ValueError("exact auxiliary values need the analytic test function")
                fn = (exact.value, exact.derivative, exact.second_derivative)[kind]
                return np.asarray(fn(aux.positions), dtype=float)
            parents = values[chain]
            return 0.5 * (parents[:-1] + parents[1:])

        return _Sources(aux.positions, aux.volumes, take)

    if req.window is Window.OPEN:
        return _Sources(d.real_positions, d.volumes[d.real], lambda values, kind: values[d.real])
    return _Sources(d.positions, d.volumes, lambda values, kind: values)


def _extend(d: ParticleDomain1D, real_values: np.ndarray) -> np.ndarray:
    # derived fields have no analytic form off the real domain: hold the edge value
    return np.concatenate(
        [
            np.full(d.n_virtual, real_values[0]),
            real_values,
            np.full(d.n_virtual, real_values[-1]),
        ]
    )


def _power_sum(d, req, xe, src: _Sources, values, exponent):
    """``sum_j V_j (xe - x_j)^exponent values_j Wt(xe, x_j)`` over past sources."""
    dist = xe[:, None] - src.x[None, :]
    past = dist > _TINY_BASE
    safe = np.where(past, dist, 1.0)
    power = np.where(past, np.exp(np.asarray(exponent)[:, None] * np.log(safe)), 0.0)
    weight = cumulative_weight(dist / d.h)
    if req.window is Window.BOUNDED:
        weight = np.clip(weight - cumulative_weight((d.a - src.x) / d.h)[None, :], 0.0, 1.0)
    return (power * weight) @ (src.volumes * values)


def _gamma(values) -> np.ndarray:
    return np.array([math.gamma(v) for v in np.atleast_1d(values)])


def _derivatives(d, f, req, need_second=False):
    c = correction_factors(d) if req.corrected else None
    df = corrected_gradient(d, f, c=c, corrected=req.corrected)
    if not need_second:
        return df, None
    d2f = brookshaw_second_derivative(d, f, c=c, corrected=req.corrected, eta=req.eta)
    return df, d2f


def _prepare(d, f, req, expected):
    if req.operator is not expected:
        raise ValueError(f"request is for {req.operator.value}, not {expected.value}")
    if req.lower_bound != d.a:
        raise ValueError(f"lower bound {req.lower_bound!r} must equal the domain start {d.a!r}")
    f = _check_samples(d, f)
    req.order.validate(d.a, d.b)
    alpha = req.order.check(d.real_positions)
    return f, alpha


def _field_values(d, req, src, f, df_real, d2f_real, kind):
    # kind 0/1/2 selects f, f', f'' at the sources
    if kind == 0:
        full = f
    elif kind == 1:
        full = _extend(d, df_real)
    else:
        full = _extend(d, d2f_real)
    return src.take(full, kind)


def rl_integral(d, aux, f, req: OperatorRequest, exact=None) -> OperatorField:
    """Fractional integral ``I^alpha f`` at every real particle."""
    f, alpha = _prepare(d, f, req, Operator.RL_INTEGRAL)
    xe = d.real_positions
    src = _sources(d, req, aux, exact)
    if req.formulation is Formulation.STANDARD:
        vals = _field_values(d, req, src, f, None, None, 0)
        total = _power_sum(d, req, xe, src, vals, alpha - 1.0)
    else:
        df, _ = _derivatives(d, f, req)
        vals = _field_values(d, req, src, f, df, None, 1)
        fa = f[d.real][0]
        total = fa * (xe - d.a) ** alpha / alpha + _power_sum(d, req, xe, src, vals, alpha) / alpha
    return OperatorField(xe, total / _gamma(alpha), req)


def caputo_derivative(d, aux, f, req: OperatorRequest, exact=None) -> OperatorField:
    """Caputo derivative ``I^{1-alpha} f'`` at every real particle."""
    f, alpha = _prepare(d, f, req, Operator.CAPUTO)
    xe = d.real_positions
    src = _sources(d, req, aux, exact)
    q = 1.0 - alpha
    if req.formulation is Formulation.STANDARD:
        df, _ = _derivatives(d, f, req)
        vals = _field_values(d, req, src, f, df, None, 1)
        total = _power_sum(d, req, xe, src, vals, -alpha)
    else:
        df, d2f = _derivatives(d, f, req, need_second=True)
        vals = _field_values(d, req, src, f, df, d2f, 2)
        total = df[0] * (xe - d.a) ** q / q + _power_sum(d, req, xe, src, vals, q) / q
    return OperatorField(xe, total / _gamma(q), req)


def rl_derivative(d, aux, f, req: OperatorRequest, exact=None) -> OperatorField:
    """Riemann-Liouville derivative ``d/dx I^{1-alpha} f`` at every real particle.

    Stage one evaluates the inner fractional integral on every particle,
    virtual ones included (it vanishes left of ``a``); stage two applies the
    corrected SPH gradient to that field.
    """
    f, alpha_real = _prepare(d, f, req, Operator.RL_DERIVATIVE)
    src = _sources(d, req, aux, exact)
    xp = d.positions
    inside = xp > d.a
    alpha = np.full(d.n_total, 0.5)
    alpha[inside] = req.order.check(xp[inside])
    q = 1.0 - alpha
    fa = f[d.real][0]
    uniform = req.order.is_uniform

    if req.formulation is Formulation.STANDARD:
        vals = _field_values(d, req, src, f, None, None, 0)
        g = _power_sum(d, req, xp, src, vals, -alpha)
    else:
        df, _ = _derivatives(d, f, req)
        vals = _field_values(d, req, src, f, df, None, 1)
        g = _power_sum(d, req, xp, src, vals, q) / q
        if not uniform:
            g = g + np.where(inside, fa * np.where(inside, xp - d.a, 1.0) ** q / q, 0.0)
    g = np.where(inside, g / _gamma(q), 0.0)

    values = corrected_gradient(d, g, corrected=req.corrected)
    xe = d.real_positions
    if req.formulation is Formulation.NONSINGULAR and uniform:
        qa = 1.0 - alpha_real
        with np.errstate(divide="ignore"):
            boundary = np.where(xe > d.a, fa / np.where(xe > d.a, xe - d.a, 1.0) ** alpha_real, 0.0)
        values = values + boundary / _gamma(qa)
    singular = (xe == d.a) & (fa != 0.0)
    values = np.where(singular, np.nan, values)
    return OperatorField(xe, values, req, singular)


_DISPATCH = {
    Operator.RL_INTEGRAL: rl_integral,
    Operator.RL_DERIVATIVE: rl_derivative,
    Operator.CAPUTO: caputo_derivative,
}


def apply_operator(d, f, req: OperatorRequest, aux=None, exact=None) -> OperatorField:
    return _DISPATCH[req.operator](d, aux, f, req, exact=exact)
