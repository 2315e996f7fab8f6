"""Cubic spline smoothing kernel in one dimension.

The kernel has support radius ``2h`` and normalisation ``1/h``.  Besides the
point value and its gradient we need the cumulative integral
``psi(z) = int_{-inf}^{z} W(u h, h) h du``, which serves as the integration
weight when SPH approximates an integral instead of a point value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fracsph.errors import KernelDomainError

__all__ = ["CubicKernel", "cumulative_weight"]

#: support radius in units of h
KAPPA = 2.0


def _check_finite(r):
    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)):
        raise KernelDomainError("kernel evaluated at a non-finite distance")
    return r


def _unwrap(out, like):
    return float(out) if np.ndim(like) == 0 else out


def cumulative_weight(z):
    """Dimensionless cumulative kernel ``psi(z)`` for ``z = r/h``.

    Piecewise quartic: ``1/2 + 2z/3 - z^3/3 + z^4/8`` on ``[0, 1)``,
    ``1 - (2 - z)^4/24`` on ``[1, 2)``, and ``1`` beyond; negative arguments
    follow from ``psi(z) + psi(-z) = 1``.
    """
    z = _check_finite(z)
    az = np.abs(z)
    inner = 0.5 + az * (2.0 / 3.0 + az * az * (-1.0 / 3.0 + az / 8.0))
    outer = 1.0 - (2.0 - az) ** 4 / 24.0
    upper = np.where(az < 1.0, inner, np.where(az < KAPPA, outer, 1.0))
    out = np.where(z >= 0.0, upper, 1.0 - upper)
    return _unwrap(out, z)


@dataclass(frozen=True)
class CubicKernel:
    """Cubic spline kernel with smoothing length ``h``.

    All evaluators accept scalars or arrays of signed distances ``r`` and
    return the same shape.  Branch joints ``|r| = h`` and ``|r| = 2h`` belong
    to the outer (right-closed) branch.
    """

    h: float

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h > 0.0):
            raise KernelDomainError(f"smoothing length must be positive, got {self.h!r}")

    @property
    def support_radius(self) -> float:
        return KAPPA * self.h

    @property
    def normalization(self) -> float:
        return 1.0 / self.h

    def value(self, r):
        r = _check_finite(r)
        z = np.abs(r) / self.h
        w = np.where(
            z < 1.0,
            2.0 / 3.0 - z * z + 0.5 * z**3,
            np.where(z < KAPPA, (2.0 - z) ** 3 / 6.0, 0.0),
        )
        return _unwrap(w / self.h, r)

    def gradient(self, r):
        """Derivative of :meth:`value` with respect to ``r`` (odd in ``r``)."""
        r = _check_finite(r)
        z = np.abs(r) / self.h
        dz = np.where(
            z < 1.0,
            -2.0 * z + 1.5 * z * z,
            np.where(z < KAPPA, -0.5 * (2.0 - z) ** 2, 0.0),
        )
        return _unwrap(np.sign(r) * dz / (self.h * self.h), r)

    def cumulative(self, r):
        """Fraction of the kernel mass lying below ``r``, i.e. ``psi(r/h)``."""
        r = _check_finite(r)
        return cumulative_weight(r / self.h)
