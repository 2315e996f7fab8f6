"""Uniform 1D particle domains with virtual and auxiliary particles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from fracsph.errors import ConstructionError
from fracsph.kernel import CubicKernel

__all__ = [
    "AuxiliaryParticles",
    "ParticleDomain1D",
    "auxiliary_particles",
    "build_domain",
    "neighbor_window",
]


@dataclass(frozen=True, eq=False)
class ParticleDomain1D:
    """Real particles on ``[a, b]`` plus ``n_virtual`` ghosts on each side.

    Arrays cover *all* particles ordered left to right: the left virtual
    particles, then the ``n_real`` real ones, then the right virtual ones.
    ``real`` is the slice selecting the real particles.
    """

    a: float
    b: float
    n_real: int
    h: float
    rho0: float
    n_virtual: int
    positions: np.ndarray = field(repr=False)
    masses: np.ndarray = field(repr=False)
    densities: np.ndarray = field(repr=False)

    @property
    def spacing(self) -> float:
        return (self.b - self.a) / (self.n_real - 1)

    @property
    def kernel(self) -> CubicKernel:
        return CubicKernel(self.h)

    @property
    def n_total(self) -> int:
        return self.n_real + 2 * self.n_virtual

    @property
    def real(self) -> slice:
        return slice(self.n_virtual, self.n_virtual + self.n_real)

    @property
    def real_positions(self) -> np.ndarray:
        return self.positions[self.real]

    @property
    def virtual_left(self) -> np.ndarray:
        return self.positions[: self.n_virtual]

    @property
    def virtual_right(self) -> np.ndarray:
        return self.positions[self.n_virtual + self.n_real :]

    @property
    def volumes(self) -> np.ndarray:
        return self.masses / self.densities

    @property
    def is_virtual(self) -> np.ndarray:
        mask = np.ones(self.n_total, dtype=bool)
        mask[self.real] = False
        return mask

    def neighbors(self, x: float) -> range:
        return neighbor_window(self, x)


@dataclass(frozen=True, eq=False)
class AuxiliaryParticles:
    """Midpoints between consecutive real particles with averaged mass/density."""

    positions: np.ndarray
    masses: np.ndarray
    densities: np.ndarray

    @property
    def volumes(self) -> np.ndarray:
        return self.masses / self.densities

    def __len__(self) -> int:
        return len(self.positions)


def build_domain(a, b, n_real, h, rho0=1.0, n_virtual=None) -> ParticleDomain1D:
    """Discretise ``[a, b]`` with ``n_real`` uniformly spaced particles.

    ``n_virtual`` defaults to ``ceil(2h/s)``, the smallest count giving every
    real particle a fully populated kernel support.  Pass ``n_virtual=0`` to
    study truncated supports.
    """
    for name, value in (("a", a), ("b", b), ("h", h), ("rho0", rho0)):
        if not math.isfinite(value):
            raise ConstructionError(name, f"must be finite, got {value!r}")
    if not b > a:
        raise ConstructionError("b", f"must exceed a={a!r}, got {b!r}")
    if int(n_real) != n_real or n_real < 2:
        raise ConstructionError("n_real", f"need an integer >= 2, got {n_real!r}")
    if not h > 0.0:
        raise ConstructionError("h", f"must be positive, got {h!r}")
    if not rho0 > 0.0:
        raise ConstructionError("rho0", f"must be positive, got {rho0!r}")
    n_real = int(n_real)
    s = (b - a) / (n_real - 1)
    if n_virtual is None:
        n_virtual = math.ceil(2.0 * h / s)
    elif int(n_virtual) != n_virtual or n_virtual < 0:
        raise ConstructionError("n_virtual", f"need an integer >= 0, got {n_virtual!r}")
    n_virtual = int(n_virtual)

    k = np.arange(-n_virtual, n_real + n_virtual, dtype=float)
    positions = a + s * k
    # pin the right end exactly on b
    positions[n_virtual + n_real - 1] = b
    positions.setflags(write=False)
    densities = np.full(positions.shape, float(rho0))
    masses = densities * s
    densities.setflags(write=False)
    masses.setflags(write=False)
    return ParticleDomain1D(
        a=float(a),
        b=float(b),
        n_real=n_real,
        h=float(h),
        rho0=float(rho0),
        n_virtual=n_virtual,
        positions=positions,
        masses=masses,
        densities=densities,
    )


def auxiliary_particles(d: ParticleDomain1D, include_virtual: bool = False) -> AuxiliaryParticles:
    """Midpoints of consecutive real particles (``n_real - 1`` of them).

    With ``include_virtual`` the midpoints of the whole chain, ghosts
    included, are returned (``n_total - 1``); integrals with the bounded
    window need them to see the kernel mass that spills past ``a`` and ``b``.
    """
    sel = slice(None) if include_virtual else d.real
    x = d.positions[sel]
    m = d.masses[sel]
    rho = d.densities[sel]
    return AuxiliaryParticles(
        positions=0.5 * (x[:-1] + x[1:]),
        masses=0.5 * (m[:-1] + m[1:]),
        densities=0.5 * (rho[:-1] + rho[1:]),
    )


def neighbor_window(d: ParticleDomain1D, x: float) -> range:
    """Indices (into ``d.positions``) of particles with ``|x - x_j| < 2h``."""
    if not math.isfinite(x):
        raise ValueError(f"position must be finite, got {x!r}")
    radius = d.kernel.support_radius
    s = d.spacing
    x0 = d.positions[0]
    lo = max(math.floor((x - radius - x0) / s), 0)
    hi = min(math.ceil((x + radius - x0) / s) + 1, d.n_total)
    # index arithmetic is approximate at the edges; settle them exactly
    while lo < hi and not abs(x - d.positions[lo]) < radius:
        lo += 1
    while hi > lo and not abs(x - d.positions[hi - 1]) < radius:
        hi -= 1
    return range(lo, hi)
