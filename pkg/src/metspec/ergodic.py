"""Random and ergodic products of semicontractions.

A driver produces the index sequence ``c_0, c_1, ...`` of maps; the
cocycle is ``Z_n = f_{c_0} o f_{c_1} o ... o f_{c_{n-1}}``, so new maps
enter on the right, and ``a(n) = d(x0, Z_n x0)`` is a subadditive
cocycle over the shift. For matrix-acting families ``Z_n x0`` is the
running product ``P_n = M_{c_0} ... M_{c_{n-1}}`` applied to ``x0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .exceptions import InvariantViolation, ParameterError
from .linalg import RENORMALIZE_EVERY, running_products
from .spaces.operator import OperatorSpace
from .spaces.torus import log_lengths, _primitive
from .spectral import Semicontraction

GOLDEN_ANGLE = (math.sqrt(5.0) - 1.0) / 2.0
DEFAULT_BASIS = ((1, 0), (0, 1), (1, 1))


@dataclass(frozen=True)
class CocycleDriver:
    """Seeded source of map indices.

    kinds: ``iid`` (``weights``), ``markov`` (``transition``, started from
    its stationary law) and ``rotation`` (``x -> x + angle mod 1`` with
    the cell boundaries ``cuts``; the start point is drawn from the seed).
    """

    kind: str
    family: tuple
    seed: int = 0
    weights: np.ndarray | None = None
    transition: np.ndarray | None = None
    angle: float | None = None
    cuts: tuple | None = None

    def __post_init__(self):
        if not self.family:
            raise ParameterError("empty map family")
        object.__setattr__(self, "family", tuple(self.family))
        k = len(self.family)
        if self.kind == "iid":
            w = np.full(k, 1.0 / k) if self.weights is None else np.asarray(self.weights, dtype=float)
            if w.shape != (k,) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
                raise ParameterError("iid weights must be nonnegative and sum to 1")
            object.__setattr__(self, "weights", w)
        elif self.kind == "markov":
            P = np.asarray(self.transition, dtype=float)
            if P.shape != (k, k) or np.any(P < 0) or np.max(np.abs(P.sum(axis=1) - 1.0)) > 1e-12:
                raise ParameterError("transition rows must be nonnegative and sum to 1")
            n_comp, _ = connected_components(P > 0, directed=True, connection="strong")
            if n_comp != 1:
                raise ParameterError("transition matrix is not irreducible")
            object.__setattr__(self, "transition", P)
        elif self.kind == "rotation":
            angle = GOLDEN_ANGLE if self.angle is None else float(self.angle)
            if not 0 < angle < 1:
                raise ParameterError("rotation angle must lie in (0, 1)")
            cuts = tuple(np.arange(1, k) / k) if self.cuts is None else tuple(float(c) for c in self.cuts)
            if len(cuts) != k - 1 or any(not 0 < c < 1 for c in cuts) or list(cuts) != sorted(cuts):
                raise ParameterError("need len(family) - 1 increasing cuts in (0, 1)")
            object.__setattr__(self, "angle", angle)
            object.__setattr__(self, "cuts", cuts)
        else:
            raise ParameterError(f"unknown driver kind {self.kind!r}")

    @property
    def space(self):
        return self.family[0].space

    def stationary(self) -> np.ndarray:
        w, V = np.linalg.eig(self.transition.T)
        pi = np.real(V[:, np.argmin(np.abs(w - 1.0))])
        return pi / pi.sum()

    def choices(self, n: int) -> np.ndarray:
        """First ``n`` indices; identical seeds give identical sequences."""
        rng = np.random.Generator(np.random.PCG64(self.seed))
        k = len(self.family)
        if self.kind == "iid":
            return rng.choice(k, size=n, p=self.weights).astype(np.int64)
        if self.kind == "markov":
            u = rng.uniform(size=n)
            cum = np.cumsum(self.transition, axis=1)
            out = np.empty(n, dtype=np.int64)
            state = int(np.searchsorted(np.cumsum(self.stationary()), rng.uniform(), side="right"))
            state = min(state, k - 1)
            for i in range(n):
                out[i] = state
                state = min(int(np.searchsorted(cum[state], u[i], side="right")), k - 1)
            return out
        x0 = rng.uniform()
        pts = np.mod(x0 + self.angle * np.arange(n), 1.0)
        return np.searchsorted(self.cuts, pts, side="right").astype(np.int64)


def _matrix_family(driver: CocycleDriver):
    space = driver.space
    if hasattr(space, "base_dists") and all(f.matrix is not None for f in driver.family):
        return [np.asarray(f.matrix) for f in driver.family]
    return None


@dataclass(frozen=True)
class CocycleTrace:
    """``a[n] = d(x0, Z_n x0)`` for ``n = 0..N`` with the choices that produced it."""

    a: np.ndarray = field(repr=False)
    choice_log: np.ndarray = field(repr=False)
    x0: Any
    driver: CocycleDriver = field(repr=False)
    log_scales: np.ndarray | None = field(default=None, repr=False)
    stack: np.ndarray | None = field(default=None, repr=False)

    @property
    def horizon(self) -> int:
        return len(self.a) - 1

    @property
    def tau_hat(self) -> float:
        return float(self.a[-1] / self.horizon)


def _compose_generic(family: Sequence[Semicontraction], choices, x0):
    space = family[0].space
    out = [0.0]
    with space.context():
        for n in range(1, len(choices) + 1):
            x = x0
            for c in choices[n - 1::-1]:
                x = family[c](x)
            out.append(space.dist(x0, x))
    return np.array(out)


def compose_cocycle(driver: CocycleDriver, n: int, x0=None, choices=None) -> CocycleTrace:
    """Log ``a(n) = d(x0, Z_n x0)`` along the driver's first ``n`` choices.

    Matrix-acting families starting at the base point use log-scaled
    running products (renormalized every 32 steps); other families
    recompose ``Z_n`` from scratch for each ``n``.
    """
    if n < 1:
        raise ParameterError("horizon must be >= 1")
    space = driver.space
    c = driver.choices(n) if choices is None else np.asarray(choices, dtype=np.int64)
    mats = _matrix_family(driver)
    if mats is not None and x0 is None:
        logs, stack = running_products(mats, c, RENORMALIZE_EVERY)
        a = np.asarray(space.base_dists(stack, logs), dtype=float)
        a[0] = 0.0
        return CocycleTrace(a, c, space.base_point, driver, logs, stack)
    x0 = space.base_point if x0 is None else space.validate(x0)
    return CocycleTrace(_compose_generic(driver.family, c, x0), c, x0, driver)


class ShiftedEvaluator:
    """``a(m, T^k omega)``, recomposed from the logged choices starting at index ``k``."""

    def __init__(self, trace: CocycleTrace):
        self.trace = trace
        self.mats = _matrix_family(trace.driver)

    def __call__(self, k: int, m: int) -> float:
        c = self.trace.choice_log
        if k < 0 or m < 0 or k + m > len(c):
            raise ParameterError("window exceeds the logged choices")
        if m == 0:
            return 0.0
        window = c[k:k + m]
        if self.mats is not None:
            logs, stack = running_products(self.mats, window)
            return float(self.trace.driver.space.base_dists(stack[-1:], logs[-1:])[0])
        return float(_compose_generic(self.trace.driver.family, window, self.trace.x0)[-1])

    def windows(self):
        """Yield ``(m, A_m)`` with ``A_m[k] = a(m, T^k omega)`` for ``k = 0..N-m``.

        Matrix families only; all windows are advanced together, ``O(N^2)`` in total.
        """
        if self.mats is None:
            raise ParameterError("window sweep needs a matrix family")
        c = self.trace.choice_log
        N = len(c)
        F = np.stack(self.mats)
        space = self.trace.driver.space
        W = np.broadcast_to(np.eye(F.shape[1], dtype=F.dtype), (N, *F.shape[1:])).copy()
        logs = np.zeros(N)
        for m in range(1, N + 1):
            size = N - m + 1
            W = np.matmul(W[:size], F[c[m - 1:N]])
            logs = logs[:size]
            if m % RENORMALIZE_EVERY == 0:
                s = np.max(np.abs(W), axis=(1, 2))
                W /= s[:, None, None]
                logs = logs + np.log(s)
            yield m, np.asarray(space.base_dists(W, logs), dtype=float)


def check_cocycle(trace: CocycleTrace, n_pairs: int = 200, tol: float = 1e-9, seed: int = 0) -> float:
    """Largest excess of ``a(n + m) - a(n) - a(m, T^n omega)`` over sampled windows."""
    ev = ShiftedEvaluator(trace)
    rng = np.random.default_rng(seed)
    N = trace.horizon
    worst = 0.0
    for _ in range(n_pairs):
        n = int(rng.integers(1, N))
        m = int(rng.integers(1, N - n + 1))
        ex = trace.a[n + m] - trace.a[n] - ev(n, m) - tol * (1 + trace.a[n + m])
        worst = max(worst, float(ex))
    if worst > 0:
        raise InvariantViolation(f"subadditive cocycle inequality fails by {worst:.3g}")
    return worst


@dataclass(frozen=True)
class CocycleRecords:
    """Record times ``n`` with ``a(n) - a(n-k, T^k omega) >= (tau_hat - eps) k`` for ``K <= k <= n``."""

    indices: np.ndarray
    K_eps: int
    K_needed: np.ndarray = field(repr=False)
    unfiltered: int
    tau_hat: float
    eps: float


def km_record_times(trace: CocycleTrace, eps: float, evaluator: ShiftedEvaluator | None = None,
                    K: int | None = None, tau_hat: float | None = None, tol: float = 1e-9) -> CocycleRecords:
    """Subadditive-cocycle record times at lag threshold ``K``.

    ``K_needed[n]`` is the smallest lag threshold for which ``n`` satisfies
    the inequality for every lag in ``[K, n]``. Unless given, ``K`` is the
    smallest ``K_needed[n]`` over the second half of the horizon. Indices
    ``n >= K`` with ``K_needed[n] <= K`` that also satisfy
    ``(tau_hat - eps) n <= a(n) <= (tau_hat + eps) n`` are returned;
    ``unfiltered`` counts them before that last condition.
    """
    if not eps > 0:
        raise ParameterError("eps must be positive")
    ev = evaluator or ShiftedEvaluator(trace)
    N = trace.horizon
    a = trace.a
    tau = trace.tau_hat if tau_hat is None else float(tau_hat)
    rate = tau - eps
    worst = np.zeros(N + 1, dtype=np.int64)  # largest violating lag per n
    n_all = np.arange(N + 1)
    worst[a < rate * n_all - tol * (1 + np.abs(a))] = n_all[a < rate * n_all - tol * (1 + np.abs(a))]
    if ev.mats is not None:
        for m, A in ev.windows():
            if m == N:
                break
            ks = np.arange(N - m + 1)
            lhs = a[m:] - A
            bad = (lhs < rate * ks - tol * (1 + np.abs(a[m:]))) & (ks >= 1)
            worst[m:] = np.maximum(worst[m:], np.where(bad, ks, 0))
    else:
        for n in range(1, N + 1):
            for k in range(1, n):
                if a[n] - ev(k, n - k) < rate * k - tol * (1 + abs(a[n])):
                    worst[n] = max(worst[n], k)
    K_needed = worst + 1
    K_needed[0] = 1
    if K is None:
        K = int(K_needed[N // 2:].min()) if N >= 2 else 1
    idx = np.flatnonzero((K_needed <= K) & (n_all >= max(K, 1)))
    sandwich = (a[idx] >= (tau - eps) * idx - tol) & (a[idx] <= (tau + eps) * idx + tol)
    return CocycleRecords(idx[sandwich], int(K), K_needed, int(idx.size), tau, float(eps))


@dataclass(frozen=True)
class LyapunovEstimate:
    exponent: float
    sequence: np.ndarray = field(repr=False)
    fekete_inf: np.ndarray = field(repr=False)
    clt_tol: float
    block_sigma: float


def clt_tolerance(increments: np.ndarray, n_blocks: int = 50) -> tuple[float, float]:
    """``(4 sigma / sqrt(n), sigma)`` with ``sigma`` estimated from block means of the increments."""
    n = increments.size
    L = max(n // n_blocks, 1)
    blocks = increments[: L * (n // L)].reshape(-1, L).mean(axis=1)
    sigma = float(np.std(blocks, ddof=1) * math.sqrt(L)) if blocks.size > 1 else 0.0
    return 4.0 * sigma / math.sqrt(n), sigma


def top_lyapunov(driver: CocycleDriver, n: int = 10000) -> LyapunovEstimate:
    """``(1/n) log |Z_n|`` for a driver of left multiplications on matrices."""
    for f in driver.family:
        if f.matrix is None or not isinstance(f.space, OperatorSpace):
            raise ParameterError(f"{f.label} is not a left multiplication on matrices")
        s = np.linalg.svd(np.asarray(f.matrix, dtype=float), compute_uv=False)
        if s[-1] <= 1e-13 * s[0]:
            raise ParameterError(f"{f.label} is singular")
    tr = compose_cocycle(driver, n)
    seq = tr.a[1:] / np.arange(1, n + 1)
    tol, sigma = clt_tolerance(np.diff(tr.a))
    return LyapunovEstimate(float(seq[-1]), seq, np.minimum.accumulate(seq), tol, sigma)


@dataclass(frozen=True)
class CurveGrowth:
    alpha: tuple
    log_lengths: np.ndarray = field(repr=False)
    rates: np.ndarray = field(repr=False)
    increments: np.ndarray = field(repr=False)
    tau_hat: float
    gap: float

    @property
    def terminal_rate(self) -> float:
        return float(self.rates[-1])


def _torus_trace(trace: CocycleTrace):
    if trace.stack is None:
        raise ParameterError("curve lengths need a matrix cocycle on the torus")
    return trace.log_scales, trace.stack


def curve_growth(driver_or_trace, alpha=(1, 0), n: int = 60) -> CurveGrowth:
    """Log-lengths ``log l_{Z_k x0}(alpha)``, the rates ``(1/k) log l`` and the drift.

    ``increments[k-1] = log l_k - log l_{k-1}``; ``gap`` compares the
    terminal rate with ``tau_hat = a(n)/n``.
    """
    alpha = _primitive(alpha)
    trace = driver_or_trace if isinstance(driver_or_trace, CocycleTrace) else compose_cocycle(driver_or_trace, n)
    logs, stack = _torus_trace(trace)
    ll = log_lengths(logs, stack, alpha)
    k = np.arange(1, trace.horizon + 1)
    rates = ll[1:] / k
    return CurveGrowth(alpha, ll, rates, np.diff(ll), trace.tau_hat, abs(float(rates[-1]) - trace.tau_hat))


@dataclass(frozen=True)
class DominantCurve:
    curve: tuple
    record_time: int
    histogram: dict
    max_gap: float
    lower_bound_margin: float
    lower_bound_ok: bool
    growth_excess: float
    growth_ok: bool
    records: CocycleRecords = field(repr=False)


def _argmax_lex(values: np.ndarray, mu: Sequence[tuple], tol: float = 1e-12) -> int:
    best = values.max()
    near = [i for i in range(len(mu)) if values[i] >= best - tol]
    return min(near, key=lambda i: mu[i])


def dominant_curve(trace: CocycleTrace, mu: Sequence = DEFAULT_BASIS, eps: float = 0.1,
                   records: CocycleRecords | None = None, n_checks: int = 2000,
                   tol: float = 1e-9) -> DominantCurve:
    """Curve of ``mu`` with the largest length ratio at the last record time.

    Ties go to the lexicographically smallest pair. Also reports which
    curve wins at each record time, the largest additive gap between
    ``a(n)`` and the best ratio over ``mu``, the lower bound
    ``log l_k(alpha) >= log l_{n_i}(alpha) - a(n_i) + (tau_hat - eps) k``
    for ``K <= k <= n_i``, and the growth cap
    ``max_mu (1/n) log(l_n / l_0) <= tau_hat + eps`` at record times.
    """
    mu = [tuple(_primitive(m)) for m in mu]
    if not mu:
        raise ParameterError("empty curve basis")
    logs, stack = _torus_trace(trace)
    rec = records or km_record_times(trace, eps)
    if rec.indices.size == 0:
        raise ParameterError("no record times to select from")
    L = np.stack([log_lengths(logs, stack, m) for m in mu])  # (len(mu), N + 1)
    R = L - L[:, :1]  # log of l_{Z_n x0} / l_{x0}
    winners = [_argmax_lex(R[:, n], mu) for n in rec.indices]
    hist = {str(mu[i]): winners.count(i) for i in range(len(mu))}
    n_i = int(rec.indices[-1])
    j = winners[-1]
    gap = float(np.max(trace.a - R.max(axis=0)))
    K = max(rec.K_eps, 1)
    ks = np.unique(np.linspace(K, n_i, min(n_checks, n_i - K + 1)).astype(int))
    bound = L[j, n_i] - trace.a[n_i] + (rec.tau_hat - rec.eps) * ks
    margin = float(np.min(L[j, ks] - bound))
    growth = R[:, rec.indices].max(axis=0) / rec.indices
    excess = float(np.max(growth - (rec.tau_hat + rec.eps)))
    return DominantCurve(mu[j], n_i, hist, gap, margin, margin >= -tol * (1 + trace.a[n_i]),
                         excess, excess <= tol, rec)
