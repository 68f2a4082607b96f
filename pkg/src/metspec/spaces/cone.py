"""Funk and Thompson distances on the open positive orthant."""
from __future__ import annotations

import numpy as np

from ..core import POINT_TOL, Space
from ..exceptions import DomainError, ParameterError


def _positive(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("cone points need strictly positive finite coordinates")
    return arr


def funk_dist(x, y) -> float:
    """Funk hemi-distance ``log max_i x_i / y_i``."""
    x, y = _positive(x), _positive(y)
    if x.shape != y.shape:
        raise DomainError("dimension mismatch")
    return float(np.log(np.max(x / y)))


def thompson_dist(x, y) -> float:
    return max(funk_dist(x, y), funk_dist(y, x))


def hilbert_projective_dist(x, y) -> float:
    """Hilbert projective distance ``log(max x/y * max y/x)`` between rays."""
    x, y = _positive(x), _positive(y)
    r = x / y
    return float(np.log(np.max(r)) - np.log(np.min(r)))


class PositiveCone(Space):
    """Interior of the positive orthant with the Funk or Thompson distance.

    The Funk variant is a genuine hemi-metric: asymmetric and possibly
    negative. Points serialize as JSON arrays.
    """

    name = "cone"

    def __init__(self, dim: int = 2, variant: str = "funk"):
        if int(dim) != dim or dim < 1:
            raise ParameterError("dim must be a positive integer")
        if variant not in ("funk", "thompson"):
            raise ParameterError(f"variant must be 'funk' or 'thompson', got {variant!r}")
        self.dim = int(dim)
        self.variant = variant
        self.symmetric = variant == "thompson"
        self._base = np.ones(self.dim)

    @property
    def base_point(self):
        return self._base

    def describe(self):
        return {"type": self.name, "dim": self.dim, "variant": self.variant}

    def validate(self, x):
        arr = _positive(x)
        if arr.shape != (self.dim,):
            raise DomainError(f"expected {self.dim} coordinates")
        return arr

    def dist(self, x, y):
        if self.variant == "funk":
            return funk_dist(x, y)
        return thompson_dist(x, y)

    def equal(self, x, y, tol=POINT_TOL):
        return bool(np.max(np.abs(np.asarray(x) - np.asarray(y))) <= tol)

    def sample(self, rng, n, scale=1.0):
        return list(np.exp(rng.normal(size=(n, self.dim)) * scale))

    def encode(self, x):
        return [float(v) for v in np.asarray(x)]

    def decode(self, obj):
        return self.validate(obj)
