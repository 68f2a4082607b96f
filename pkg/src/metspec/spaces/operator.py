"""The operator hemi-metric on invertible matrices."""
from __future__ import annotations

import numpy as np

from ..core import POINT_TOL, Space
from ..exceptions import DomainError, ParameterError
from ..linalg import ScaledMatrix, sigma_max

SINGULAR_RTOL = 1e-13


def _invertible(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("expected a square matrix")
    s = np.linalg.svd(a, compute_uv=False)
    if not np.all(np.isfinite(s)) or s[-1] <= SINGULAR_RTOL * s[0]:
        raise DomainError("matrix is singular")
    return a


def operator_hemi_dist(A, B) -> float:
    """``log sup_v |B^t v| / |A^t v|``, the top singular value of ``B^t (A^t)^-1``."""
    A, B = _invertible(A), _invertible(B)
    X = np.linalg.solve(A, B).T  # B^t (A^t)^-1 = (A^-1 B)^t
    return float(np.log(np.linalg.norm(X, 2)))


class OperatorSpace(Space):
    """Invertible ``dim x dim`` matrices, based at the identity.

    Points are :class:`ScaledMatrix` values so that long products keep a
    separate log-scale. Left multiplication ``A -> G A`` is an isometry.
    Points serialize as ``{"log_scale": s, "matrix": [[...]]}``.
    """

    name = "operator"

    def __init__(self, dim: int = 2):
        if int(dim) != dim or dim < 1:
            raise ParameterError("dim must be a positive integer")
        self.dim = int(dim)

    @property
    def base_point(self):
        return ScaledMatrix.identity(self.dim)

    def describe(self):
        return {"type": self.name, "dim": self.dim}

    def validate(self, A):
        A = ScaledMatrix.of(A)
        if A.mat.shape != (self.dim, self.dim):
            raise DomainError(f"expected a {self.dim}x{self.dim} matrix")
        _invertible(A.mat)
        return A

    def dist(self, A, B):
        A, B = ScaledMatrix.of(A), ScaledMatrix.of(B)
        X = np.linalg.solve(A.mat, B.mat)
        return B.log_scale - A.log_scale + float(np.log(np.linalg.norm(X, 2)))

    def equal(self, A, B, tol=POINT_TOL):
        A, B = ScaledMatrix.of(A), ScaledMatrix.of(B)
        return bool(np.max(np.abs(A.to_array() - B.to_array())) <= tol)

    def sample(self, rng, n, scale=1.0):
        out = []
        while len(out) < n:
            a = np.eye(self.dim) + scale * rng.normal(size=(self.dim, self.dim)) / np.sqrt(self.dim)
            s = np.linalg.svd(a, compute_uv=False)
            if s[-1] > 1e-3:
                out.append(ScaledMatrix.of(a))
        return out

    def encode(self, A):
        A = ScaledMatrix.of(A)
        return {"log_scale": A.log_scale, "matrix": A.mat.tolist()}

    def decode(self, obj):
        if isinstance(obj, dict):
            return self.validate(ScaledMatrix(float(obj["log_scale"]), np.asarray(obj["matrix"], float)))
        return self.validate(obj)

    # matrix actions -----------------------------------------------------
    def act(self, P: ScaledMatrix, A):
        return (P @ ScaledMatrix.of(A)).renormalized()

    def base_dists(self, stack, log_scales):
        return log_scales + np.log(sigma_max(stack))

