"""Small dense linear-algebra helpers with log-scale carries.

Long products of matrices overflow quickly, so products are stored as
``exp(log_scale) * mat`` with ``mat`` kept at unit operator norm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RENORMALIZE_EVERY = 32


@dataclass(frozen=True)
class ScaledMatrix:
    """The matrix ``exp(log_scale) * mat``."""

    log_scale: float
    mat: np.ndarray

    @classmethod
    def of(cls, a) -> "ScaledMatrix":
        if isinstance(a, ScaledMatrix):
            return a
        return cls(0.0, np.asarray(a, dtype=float))

    @classmethod
    def identity(cls, n: int) -> "ScaledMatrix":
        return cls(0.0, np.eye(n))

    @property
    def shape(self):
        return self.mat.shape

    def __matmul__(self, other) -> "ScaledMatrix":
        other = ScaledMatrix.of(other)
        return ScaledMatrix(self.log_scale + other.log_scale, self.mat @ other.mat)

    def renormalized(self) -> "ScaledMatrix":
        norm = np.linalg.norm(self.mat, 2)
        if norm == 0.0 or not np.isfinite(norm):
            return self
        return ScaledMatrix(self.log_scale + float(np.log(norm)), self.mat / norm)

    def log_norm(self) -> float:
        """Log of the operator 2-norm."""
        return self.log_scale + float(np.log(np.linalg.norm(self.mat, 2)))

    def to_array(self) -> np.ndarray:
        return np.exp(self.log_scale) * self.mat


def sigma_max(stack: np.ndarray) -> np.ndarray:
    """Largest singular value of every matrix in a stack ``(N, k, k)``.

    2x2 stacks use the closed form, larger ones fall back to SVD.
    """
    stack = np.asarray(stack)
    if stack.shape[-2:] == (2, 2):
        a, b = stack[..., 0, 0], stack[..., 0, 1]
        c, d = stack[..., 1, 0], stack[..., 1, 1]
        if np.iscomplexobj(stack):
            fro2 = np.sum(np.abs(stack) ** 2, axis=(-2, -1))
            det = np.abs(a * d - b * c)
        else:
            fro2 = a * a + b * b + c * c + d * d
            det = a * d - b * c
        disc = np.sqrt(np.maximum(fro2 * fro2 - 4.0 * det * det, 0.0))
        return np.sqrt(0.5 * (fro2 + disc))
    return np.linalg.svd(stack, compute_uv=False)[..., 0]


def adjugate2(stack: np.ndarray) -> np.ndarray:
    """Adjugate of each 2x2 matrix in a stack (the inverse times det)."""
    out = np.empty_like(stack)
    out[..., 0, 0] = stack[..., 1, 1]
    out[..., 0, 1] = -stack[..., 0, 1]
    out[..., 1, 0] = -stack[..., 1, 0]
    out[..., 1, 1] = stack[..., 0, 0]
    return out


def running_products(mats, choices, renormalize_every: int = RENORMALIZE_EVERY):
    """``P_k = mats[c_0] @ ... @ mats[c_{k-1}]`` for ``k = 0..n``.

    Returns ``(log_scales, stack)`` with ``P_k = exp(log_scales[k]) * stack[k]``;
    the running product is rescaled to unit norm every ``renormalize_every`` steps.
    """
    mats = [np.asarray(m) for m in mats]
    dim = mats[0].shape[0]
    dtype = np.result_type(*mats)
    n = len(choices)
    stack = np.empty((n + 1, dim, dim), dtype=dtype)
    logs = np.zeros(n + 1)
    P = np.eye(dim, dtype=dtype)
    s = 0.0
    stack[0] = P
    for k, c in enumerate(choices, 1):
        P = P @ mats[c]
        if k % renormalize_every == 0:
            nrm = float(np.max(np.abs(P)))
            P = P / nrm
            s += math.log(nrm)
        stack[k] = P
        logs[k] = s
    return logs, stack


def matmul_stack(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("nij,njk->nik", a, b)
