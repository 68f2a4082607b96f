"""Distortion coefficient of a C^1 interval map."""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from ..exceptions import DomainError, ParameterError


class DistortionEstimate(NamedTuple):
    coarse: float  # grid of n points
    fine: float  # grid of 2n points


def distortion_coeff(dg: Callable[[np.ndarray], np.ndarray], interval, n: int = 1000) -> float:
    """``sup_{x,y in I} |log(g'(x) / g'(y))|`` over a uniform grid of ``n`` points.

    Equivalent to ``log max g' - log min g'`` on the grid, so it is
    non-decreasing under grid refinement by nesting.
    """
    if n < 2:
        raise ParameterError("need at least 2 grid points")
    a, b = (float(t) for t in interval)
    if not b > a:
        raise ParameterError("interval must have positive length")
    xs = np.linspace(a, b, int(n))
    d = np.asarray(dg(xs), dtype=float)
    if d.shape != xs.shape:
        d = np.array([float(dg(x)) for x in xs])
    if not np.all(np.isfinite(d)) or np.any(d <= 0):
        raise DomainError("derivative must be positive on the grid")
    return float(np.log(d.max()) - np.log(d.min()))


def distortion_estimate(dg, interval, n: int = 1000) -> DistortionEstimate:
    """Distortion on grids of ``n`` and ``2n - 1`` points (the finer one nests the coarser)."""
    return DistortionEstimate(distortion_coeff(dg, interval, n),
                              distortion_coeff(dg, interval, 2 * n - 1))
