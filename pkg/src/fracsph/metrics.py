"""Pointwise absolute error, relative L2 error and R^2 score."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = ["ErrorReport", "error_report"]


@dataclass(frozen=True, eq=False)
class ErrorReport:
    abs_errors: np.ndarray
    l2: float
    #: ``None`` when the reference is constant (R^2 undefined)
    r2: Optional[float]
    n_points: int
    excluded_points: int = 0
    #: true when the reference norm vanished and ``l2`` is an absolute norm
    l2_absolute: bool = False

    @property
    def r2_defined(self) -> bool:
        return self.r2 is not None


def error_report(approx, reference, exclude=None) -> ErrorReport:
    """Compare ``approx`` with ``reference`` particle by particle.

    ``exclude`` masks particles (e.g. boundary singularities) left out of the
    aggregate norms; their absolute error is reported as NaN.  If the
    reference is identically zero the relative L2 error is undefined and the
    absolute norm ``sqrt(sum |delta|^2)`` is reported instead.
    """
    approx = np.asarray(getattr(approx, "values", approx), dtype=float)
    reference = np.asarray(reference, dtype=float)
    if approx.shape != reference.shape:
        raise ValueError(f"length mismatch: {approx.shape} vs {reference.shape}")
    keep = np.ones(approx.shape, dtype=bool) if exclude is None else ~np.asarray(exclude, bool)
    if keep.sum() < 2:
        raise ValueError("need at least two points to compare")

    abs_errors = np.full(approx.shape, np.nan)
    delta = approx[keep] - reference[keep]
    abs_errors[keep] = np.abs(delta)
    ref = reference[keep]

    err_sq = float(np.sum(delta * delta))
    ref_sq = float(np.sum(ref * ref))
    if ref_sq > 0.0:
        l2 = np.sqrt(err_sq) / np.sqrt(ref_sq)
        absolute = False
    else:
        l2 = np.sqrt(err_sq)
        absolute = True
    spread = ref - ref.mean()
    var = float(np.sum(spread * spread))
    r2 = 1.0 - err_sq / var if var > 0.0 and np.ptp(ref) > 0.0 else None
    return ErrorReport(
        abs_errors=abs_errors,
        l2=float(l2),
        r2=None if r2 is None else float(r2),
        n_points=int(keep.sum()),
        excluded_points=int((~keep).sum()),
        l2_absolute=absolute,
    )
