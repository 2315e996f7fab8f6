"""SPH building blocks: interpolation, corrected gradients, integrals.

Field samples are plain float arrays aligned with ``domain.positions`` (real
and virtual particles).  Operations that act per real particle return arrays
of length ``n_real`` unless a single index ``i`` is requested.
"""

from __future__ import annotations

import enum
from typing import Callable

import numpy as np

from fracsph.domain import AuxiliaryParticles, ParticleDomain1D
from fracsph.errors import EvaluationError, SingularMomentError
from fracsph.kernel import cumulative_weight

__all__ = [
    "VirtualField",
    "Window",
    "approximate_function",
    "brookshaw_second_derivative",
    "correction_factors",
    "corrected_gradient",
    "default_eta",
    "integration_weight",
    "sample_field",
    "sph_integrate_auxiliary",
    "sph_integrate_standard",
]


class Window(str, enum.Enum):
    """How the cumulative kernel turns into an integration weight.

    ``BOUNDED`` integrates the kernel over ``[a, upper]`` exactly, so virtual
    particles below ``a`` carry partial weights.  ``OPEN`` integrates it over
    ``(-inf, upper]`` and only real (or auxiliary) particles act as sources.
    """

    BOUNDED = "bounded"
    OPEN = "open"


class VirtualField(str, enum.Enum):
    ANALYTIC = "analytic"
    ZERO = "zero"
    MIRROR = "mirror"


def sample_field(d: ParticleDomain1D, fn: Callable, virtual_field="analytic") -> np.ndarray:
    """Sample ``fn`` on every particle of ``d``.

    Virtual particles receive ``fn`` itself (``analytic``), zero, or the value
    at the real particle mirrored through the nearest bound (``mirror``).
    """
    mode = VirtualField(virtual_field)
    x = d.positions
    values = np.array(np.broadcast_to(fn(x), x.shape), dtype=float)
    nv = d.n_virtual
    if mode is VirtualField.ZERO:
        values[d.is_virtual] = 0.0
    elif mode is VirtualField.MIRROR and nv:
        real = values[d.real]
        k = np.arange(1, nv + 1)
        values[nv - k] = real[np.minimum(k, d.n_real - 1)]
        values[nv + d.n_real - 1 + k] = real[np.maximum(d.n_real - 1 - k, 0)]
    if not np.all(np.isfinite(values)):
        raise EvaluationError("field samples must be finite")
    return values


def _check_samples(d: ParticleDomain1D, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (d.n_total,):
        raise ValueError(f"expected {d.n_total} samples (real + virtual), got shape {f.shape}")
    return f


def approximate_function(d: ParticleDomain1D, f, x):
    """Kernel interpolation ``sum_j V_j f_j W(x - x_j)`` at arbitrary ``x``."""
    f = _check_samples(d, f)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    r = xs[:, None] - d.positions[None, :]
    inside = np.abs(r) < d.kernel.support_radius
    if not np.all(inside.any(axis=1)):
        bad = xs[~inside.any(axis=1)][0]
        raise EvaluationError(f"no particles within the kernel support of x={bad!r}")
    out = d.kernel.value(r) @ (d.volumes * f)
    return float(out[0]) if np.ndim(x) == 0 else out


def _moments(d: ParticleDomain1D) -> np.ndarray:
    xi = d.real_positions
    r = xi[:, None] - d.positions[None, :]
    return -(d.kernel.gradient(r) * r) @ d.volumes


def correction_factors(d: ParticleDomain1D) -> np.ndarray:
    """Per-real-particle factor ``1 / (-sum_j V_j W'(x_ij) x_ij)``."""
    moment = _moments(d)
    zero = np.flatnonzero(moment == 0.0)
    if zero.size:
        raise SingularMomentError(int(zero[0]))
    return 1.0 / moment


def _gradient_matrix(d: ParticleDomain1D, c=None, corrected=True) -> np.ndarray:
    # (n_real, n_total) matrix G with G @ f the gradient in difference form
    xi = d.real_positions
    r = xi[:, None] - d.positions[None, :]
    G = d.kernel.gradient(r) * d.volumes[None, :]
    if corrected:
        c = correction_factors(d) if c is None else np.asarray(c, dtype=float)
        G *= c[:, None]
    rows = np.arange(d.n_real)
    G[rows, rows + d.n_virtual] -= G.sum(axis=1)
    return G


def _select(values: np.ndarray, i, n: int):
    if i is None:
        return values
    if not (isinstance(i, (int, np.integer)) and 0 <= i < n):
        raise IndexError(f"real-particle index {i!r} out of range [0, {n})")
    return float(values[i])


def corrected_gradient(d: ParticleDomain1D, f, c=None, i=None, corrected=True):
    """Kernel-gradient-corrected derivative at the real particles.

    Uses ``sum_j V_j (f_j - f_i) L_i^{-1} W'(x_ij)``; on a full uniform
    support this equals the plain sum ``sum_j V_j f_j L_i^{-1} W'(x_ij)`` up
    to round-off, and it stays exact for affine fields when the support is
    truncated.
    """
    f = _check_samples(d, f)
    return _select(_gradient_matrix(d, c, corrected) @ f, i, d.n_real)


def default_eta(h: float) -> float:
    return 0.01 * h


def brookshaw_second_derivative(d: ParticleDomain1D, f, i=None, c=None, corrected=True, eta=None):
    """Second derivative from first kernel derivatives (Brookshaw form).

    ``-2 sum_j V_j (f_j - f_i) x_ij dW_ij / (x_ij^2 + eta^2)``, with the
    corrected kernel gradient unless ``corrected`` is false.
    """
    f = _check_samples(d, f)
    eta = default_eta(d.h) if eta is None else float(eta)
    xi = d.real_positions
    r = xi[:, None] - d.positions[None, :]
    grad = d.kernel.gradient(r)
    if corrected:
        c = correction_factors(d) if c is None else np.asarray(c, dtype=float)
        grad = grad * c[:, None]
    diff = f[None, :] - f[d.real][:, None]
    denom = r * r + eta * eta
    # with eta = 0 the self term is 0/0; it contributes nothing
    ratio = np.divide(r * grad, denom, out=np.zeros_like(r), where=denom > 0)
    terms = d.volumes[None, :] * diff * ratio
    return _select(-2.0 * terms.sum(axis=1), i, d.n_real)


def integration_weight(d: ParticleDomain1D, upper, x, window="bounded"):
    """Kernel mass of a particle at ``x`` that falls inside the integration range.

    ``bounded``: ``psi((upper - x)/h) - psi((a - x)/h)`` clipped to ``[0, 1]``.
    ``open``: ``psi((upper - x)/h)``.
    """
    window = Window(window)
    x = np.asarray(x, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(upper < d.a) or np.any(upper > d.b):
        raise ValueError(f"upper bound must lie in [{d.a}, {d.b}]")
    w = cumulative_weight((upper - x) / d.h)
    if window is Window.BOUNDED:
        w = np.clip(w - cumulative_weight((d.a - x) / d.h), 0.0, 1.0)
    return float(w) if np.ndim(w) == 0 else w


def sph_integrate_standard(d: ParticleDomain1D, g, upper, window="bounded"):
    """Approximate ``int_a^upper g dx`` from particle samples ``g``."""
    g = _check_samples(d, g)
    window = Window(window)
    if window is Window.OPEN:
        x, vol, g = d.real_positions, d.volumes[d.real], g[d.real]
    else:
        x, vol = d.positions, d.volumes
    return float(np.sum(vol * g * integration_weight(d, upper, x, window)))


def sph_integrate_auxiliary(
    d: ParticleDomain1D,
    aux: AuxiliaryParticles,
    g,
    upper,
    window="bounded",
    aux_values=None,
):
    """Midpoint-particle variant of :func:`sph_integrate_standard`.

    The value at each midpoint is the average of its two parents unless
    ``aux_values`` supplies it directly.  For real-only midpoints ``g`` may
    hold real or full samples; midpoints spanning the ghosts (see
    :func:`fracsph.domain.auxiliary_particles`) need full samples.
    """
    g = np.asarray(g, dtype=float)
    if aux_values is not None:
        gbar = np.asarray(aux_values, dtype=float)
    else:
        if len(aux) == d.n_total - 1:
            parents = _check_samples(d, g)
        else:
            parents = g[d.real] if g.shape == (d.n_total,) else g
            if parents.shape != (d.n_real,):
                raise ValueError(f"expected {d.n_real} real-particle samples, got shape {g.shape}")
        gbar = 0.5 * (parents[:-1] + parents[1:])
    if gbar.shape != (len(aux),):
        raise ValueError(f"expected {len(aux)} auxiliary values, got shape {gbar.shape}")
    w = integration_weight(d, upper, aux.positions, window)
    return float(np.sum(aux.volumes * gbar * w))
