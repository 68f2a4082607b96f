"""Orbits of a single semicontraction and their spectral invariants.

The drift ``tau = lim d(x0, f^n x0) / n`` exists by subadditivity; the
record-time construction below turns a finite orbit into an anchored
metric functional that decreases at least linearly along the orbit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .core import ALGEBRAIC_TOL, MetricFunctional, Space, internal_functional
from .exceptions import (
    DomainError,
    HorizonExhaustedError,
    InvariantViolation,
    ParameterError,
    PreconditionError,
    PropagationError,
    UnsupportedMapError,
)

#: tolerance block shared by experiments (algebraic, geometric, ergodic)
TOLERANCES = {"algebraic": 1e-9, "geometric": 1e-6, "ergodic": 1e-3}
DEFAULT_EPS_SCHEDULE = tuple(2.0 ** -i for i in range(1, 11))


@dataclass(frozen=True)
class Semicontraction:
    """A 1-Lipschitz self-map of ``space``.

    ``oracle`` holds closed-form invariants when known (``tau``,
    ``min_displacement``, ``fixed_point``, ``boundary_point``) plus a
    ``provenance`` string. ``matrix`` is set for maps acting through a
    matrix representation of the space (see ``Space.act``).
    """

    space: Space
    apply: Callable[[Any], Any] = field(repr=False)
    label: str = "f"
    oracle: Mapping[str, Any] = field(default_factory=dict)
    inverse: Callable[[Any], Any] | None = field(default=None, repr=False)
    isometry: bool = False
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __call__(self, x):
        return self.apply(x)

    def with_space(self, space: Space) -> "Semicontraction":
        return replace(self, space=space)

    def compose(self, other: "Semicontraction") -> "Semicontraction":
        """The map ``self o other``."""
        f, g = self.apply, other.apply
        inv = None
        if self.inverse is not None and other.inverse is not None:
            fi, gi = self.inverse, other.inverse
            inv = lambda x: gi(fi(x))  # noqa: E731
        mat = None
        if self.matrix is not None and other.matrix is not None:
            mat = self.matrix @ other.matrix
        return Semicontraction(self.space, lambda x: f(g(x)), f"{self.label}*{other.label}",
                               inverse=inv, isometry=self.isometry and other.isometry, matrix=mat)

    def inverted(self) -> "Semicontraction":
        if self.inverse is None or not self.isometry:
            raise UnsupportedMapError(f"{self.label} is not an invertible isometry")
        mat = None if self.matrix is None else np.linalg.inv(self.matrix)
        return Semicontraction(self.space, self.inverse, f"{self.label}^-1", inverse=self.apply,
                               isometry=True, matrix=mat)


@dataclass(frozen=True)
class OrbitTrace:
    """Orbit ``f^k(x0)``, ``k = 0..n``, with ``a_k = d(x0, f^k x0)``.

    Traces computed from matrix products carry no ``points``.
    """

    space: Space
    x0: Any
    points: list = field(repr=False)
    dists: np.ndarray = field(repr=False)
    step_dists: np.ndarray = field(repr=False)
    label: str = "f"
    oracle: Mapping[str, Any] = field(default_factory=dict)
    checks: Mapping[str, float] = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return len(self.dists) - 1


@dataclass(frozen=True)
class DriftEstimate:
    tau_hat: float
    sequence: np.ndarray = field(repr=False)
    fekete_inf: np.ndarray = field(repr=False)
    horizon: int
    oracle_tau: float | None = None

    @property
    def fekete_gap(self) -> float:
        """``a_n/n - min_k a_k/k`` at the horizon (0 for monotone sequences)."""
        return float(self.tau_hat - self.fekete_inf[-1])

    @property
    def oracle_gap(self) -> float | None:
        if self.oracle_tau is None:
            return None
        return abs(self.tau_hat - self.oracle_tau)


def _prepare_precision(f: Semicontraction, x0, n: int) -> Semicontraction:
    space = f.space
    if not hasattr(space, "precision_for"):
        return f
    with space.context():
        step = space.dist(x0, f(x0))
    need = space.precision_for(n, step)
    if need > space.dps:
        return f.with_space(space.with_precision(need))
    return f


def _check_subadditive(a: np.ndarray, tol: float, n_pairs: int, seed: int) -> float:
    n = len(a) - 1
    if n < 2:
        return 0.0
    if n <= 150:
        m, k = np.triu_indices(n + 1, 1)
        keep = (m >= 1) & (m + k <= n)
        m, k = m[keep], k[keep]
    else:
        rng = np.random.default_rng(seed)
        m = rng.integers(1, n, size=n_pairs)
        k = rng.integers(1, n + 1 - m)
        small = np.array([(i, j) for i in range(1, 51) for j in range(1, 51) if i + j <= n]).T
        m, k = np.concatenate([m, small[0]]), np.concatenate([k, small[1]])
    excess = a[m + k] - a[m] - a[k] - tol * (1.0 + np.abs(a[m + k]))
    return float(max(excess.max(), 0.0) if excess.size else 0.0)


def orbit(f: Semicontraction, x0=None, n: int = 100, check: bool = True,
          tol: float = ALGEBRAIC_TOL, n_pairs: int = 2000, seed: int = 0) -> OrbitTrace:
    """Iterate ``f`` from ``x0`` (default: the base point) for ``n`` steps.

    Disk orbits get their working precision raised so that ``n`` steps
    stay resolvable. With ``check`` the trace is verified to be
    subadditive (all pairs for short traces, ``n_pairs`` random pairs
    otherwise) and to have non-increasing step distances.
    """
    if n < 1:
        raise ParameterError("horizon must be >= 1")
    space = f.space
    x0 = space.base_point if x0 is None else space.validate(x0)
    f = _prepare_precision(f, x0, n)
    space = f.space
    with space.context():
        x0 = space.validate(x0)
        points = [x0]
        x = x0
        for k in range(1, n + 1):
            try:
                x = space.validate(f(x))
            except (DomainError, ArithmeticError, ValueError) as exc:
                raise PropagationError(k, exc) from exc
            points.append(x)
        dists = np.array([space.dist(x0, p) for p in points])
        steps = np.array([space.dist(points[k], points[k + 1]) for k in range(n)])
    checks = {}
    if check:
        checks["subadditivity_excess"] = _check_subadditive(dists, tol, n_pairs, seed)
        rise = np.diff(steps) - tol * (1.0 + steps[:-1])
        checks["step_increase"] = float(max(rise.max(), 0.0)) if rise.size else 0.0
        if checks["subadditivity_excess"] > 0:
            raise InvariantViolation(f"orbit of {f.label} is not subadditive: {checks}")
        if checks["step_increase"] > 0:
            raise InvariantViolation(f"step distances of {f.label} increase: {checks}")
    return OrbitTrace(space, x0, points, dists, steps, f.label, dict(f.oracle), checks)


def matrix_orbit(f: Semicontraction, n: int = 100, check: bool = True,
                 tol: float = ALGEBRAIC_TOL, seed: int = 0) -> OrbitTrace:
    """Distances ``a_k`` from the base point via log-scaled matrix powers.

    Needs ``f.matrix`` and a space with ``base_dists``; much faster than
    :func:`orbit` for long disk orbits, which would otherwise need
    thousands of digits. Points are not materialized.
    """
    from .linalg import running_products

    if f.matrix is None or not hasattr(f.space, "base_dists"):
        raise UnsupportedMapError(f"{f.label} has no matrix representation on {f.space.name}")
    if n < 1:
        raise ParameterError("horizon must be >= 1")
    logs, stack = running_products([f.matrix], np.zeros(n, dtype=int))
    dists = np.asarray(f.space.base_dists(stack, logs), dtype=float)
    dists[0] = 0.0
    if not np.all(np.isfinite(dists)):
        raise PropagationError(int(np.flatnonzero(~np.isfinite(dists))[0]), ValueError("non-finite distance"))
    checks = {}
    if check:
        checks["subadditivity_excess"] = _check_subadditive(dists, tol, 2000, seed)
        if checks["subadditivity_excess"] > 0:
            raise InvariantViolation(f"orbit of {f.label} is not subadditive: {checks}")
    return OrbitTrace(f.space, f.space.base_point, [], dists, np.array([]), f.label,
                      dict(f.oracle), checks)


def drift(trace: OrbitTrace) -> DriftEstimate:
    """Drift estimate ``a_n / n`` with the running Fekete infimum."""
    if trace.horizon < 1:
        raise ParameterError("trace needs at least one step")
    k = np.arange(1, trace.horizon + 1)
    seq = trace.dists[1:] / k
    return DriftEstimate(float(seq[-1]), seq, np.minimum.accumulate(seq), trace.horizon,
                         trace.oracle.get("tau"))


# minimal displacement ----------------------------------------------------------

class BoxWindow:
    """Axis-aligned box in ``R^d`` used as a compact search window."""

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if self.lo.shape != self.hi.shape or np.any(self.hi <= self.lo):
            raise ParameterError("box needs lo < hi componentwise")
        self.center = 0.5 * (self.lo + self.hi)
        self.size = float(np.max(self.hi - self.lo))

    def draw(self, rng, k):
        return list(rng.uniform(self.lo, self.hi, size=(k, self.lo.size)))

    def perturb(self, x, scale, rng):
        return np.clip(np.asarray(x) + scale * rng.normal(size=self.lo.size), self.lo, self.hi)

    def depth(self, x):
        half = 0.5 * (self.hi - self.lo)
        return float(np.min(np.minimum(x - self.lo, self.hi - x) / half))

    def segment(self, x, t):
        return self.center + t * (np.asarray(x) - self.center)


class DiskWindow:
    """Closed Euclidean disk ``|z| <= radius`` inside the Poincaré disk."""

    def __init__(self, radius: float = 0.99):
        if not 0 < radius < 1:
            raise ParameterError("radius must lie in (0, 1)")
        self.radius = float(radius)
        self.center = 0j
        self.size = 2 * self.radius

    def draw(self, rng, k):
        r = self.radius * np.sqrt(rng.uniform(size=k))
        return list(r * np.exp(2j * np.pi * rng.uniform(size=k)))

    def perturb(self, z, scale, rng):
        w = complex(z) + scale * complex(*rng.normal(size=2))
        if abs(w) > self.radius:
            w *= self.radius / abs(w)
        return w

    def depth(self, z):
        return (self.radius - abs(complex(z))) / self.radius

    def segment(self, z, t):
        return t * complex(z)


@dataclass(frozen=True)
class DisplacementSearch:
    value: float
    point: Any
    depth: float
    log: list = field(repr=False, default_factory=list)


def search_displacement(f: Semicontraction, window, n_random: int = 400, n_local: int = 300,
                        seed: int = 0) -> DisplacementSearch:
    """Random search plus stochastic hill-climbing for ``min d(x, f x)`` in ``window``."""
    if window is None or n_random < 1:
        raise ParameterError("empty sampler: need a window and at least one random draw")
    space = f.space
    rng = np.random.default_rng(seed)
    log = []

    def disp(x):
        with space.context():
            p = space.validate(x)
            return space.dist(p, f(p))

    cands = window.draw(rng, n_random)
    vals = [disp(x) for x in cands]
    i = int(np.argmin(vals))
    best, best_val = cands[i], vals[i]
    log.append(("random", float(best_val)))
    scale = window.size / 8
    stall = 0
    for _ in range(n_local):
        y = window.perturb(best, scale, rng)
        v = disp(y)
        if v < best_val:
            best, best_val, stall = y, v, 0
        else:
            stall += 1
            if stall >= 10:
                scale *= 0.5
                stall = 0
    log.append(("local", float(best_val)))
    return DisplacementSearch(float(best_val), best, float(window.depth(best)), log)


def min_displacement(f: Semicontraction, window, n_random: int = 400, n_local: int = 300,
                     seed: int = 0) -> float:
    """Best found ``d(x, f x)`` over ``window``: an upper bound on the minimal displacement."""
    return search_displacement(f, window, n_random, n_local, seed).value


@dataclass(frozen=True)
class Classification:
    kind: str
    d_f_hat: float
    tau_hat: float
    evidence: Mapping[str, Any] = field(default_factory=dict)


def classify(f: Semicontraction, window, tol: float = 1e-3, horizon: int = 200,
             margin: float = 0.02, n_random: int = 400, n_local: int = 300,
             seed: int = 0) -> Classification:
    """Elliptic / hyperbolic / parabolic / undetermined, decided inside ``window``.

    Attainment is only declared for minimizers at relative depth above
    ``margin``. A minimizer at the window boundary whose displacement
    decreases along the segment from the window center is parabolic.
    """
    if tol <= 0:
        raise ParameterError("tol must be positive")
    trace = orbit(f, n=horizon)
    tau_hat = drift(trace).tau_hat
    search = search_displacement(f, window, n_random, n_local, seed)
    space = trace.space
    with space.context():
        ts = np.linspace(0.5, 1.0, 11)
        profile = []
        for t in ts:
            p = space.validate(window.segment(search.point, t))
            profile.append(space.dist(p, f(p)))
        reach = space.dist(space.base_point, space.validate(search.point))
    profile = np.array(profile)
    decreasing = bool(np.all(np.diff(profile) <= tol * 1e-3 + 1e-12))
    # a_n(x0) <= a_n(x*) + 2 d(x0, x*) and a_n(x*) <= n d(x*, f x*)
    consistency = tau_hat <= search.value + tol + 2 * reach / horizon
    evidence = {"search": search.log, "depth": search.depth, "profile": profile.tolist(),
                "best_point": search.point, "consistent": consistency}
    interior = search.depth > margin
    if search.value < tol and interior:
        kind = "elliptic"
    elif tau_hat >= tol and search.value <= tau_hat + tol and interior:
        kind = "hyperbolic"
    elif not interior and decreasing:
        kind = "parabolic"
    else:
        kind = "undetermined"
    return Classification(kind, search.value, tau_hat, evidence)


# record times and the extracted functional ------------------------------------------

def record_times(trace: OrbitTrace, eps: float, tau_hat: float | None = None) -> np.ndarray:
    """Indices ``n`` with ``b(n) > b(m)`` for all ``m < n``, ``b(n) = a_n - (tau_hat - eps) n``."""
    if not eps > 0:
        raise ParameterError("eps must be positive")
    if tau_hat is None:
        tau_hat = drift(trace).tau_hat
    n = np.arange(trace.horizon + 1)
    b = trace.dists - (tau_hat - eps) * n
    prev = np.maximum.accumulate(b)[:-1]
    return np.flatnonzero(b[1:] > prev) + 1


def boundary_match(space: Space, anchor, probes, tol_dist: float = 1e-12):
    """Nearest closed-form boundary functional to the one anchored at ``anchor``.

    Disk anchors match the Busemann function of ``anchor / |anchor|``;
    Euclidean ``p = 2`` anchors match ``-(y, anchor / |anchor|)``.
    Returns ``(functional, max probe error)`` or ``None``.
    """
    from .spaces.disk import PoincareDisk, disk_busemann
    from .spaces.euclidean import EuclideanSpace, linear_dual

    h = internal_functional(space, anchor)
    if isinstance(space, PoincareDisk):
        z = complex(anchor)
        if abs(z) < tol_dist:
            return None
        cand = disk_busemann(z / abs(z), space)
    elif isinstance(space, EuclideanSpace) and space.p == 2.0:
        x = np.asarray(anchor, dtype=float)
        if np.linalg.norm(x) < tol_dist:
            return None
        cand = linear_dual(x / np.linalg.norm(x))
    else:
        return None
    with space.context():
        err = max(abs(h(y) - cand(y)) for y in probes)
    return cand, float(err)


def extract_functional(f: Semicontraction, x0=None, eps_schedule: Sequence[float] = DEFAULT_EPS_SCHEDULE,
                       horizon: int = 1000, slack: float = ALGEBRAIC_TOL, probes=None,
                       trace: OrbitTrace | None = None, seed: int = 0) -> MetricFunctional:
    """Anchored functional at the last record time for the smallest working eps.

    For each ``eps`` in the strictly decreasing schedule the record times
    of ``b(n) = a_n - (tau_hat - eps) n`` are computed; the anchor is
    ``f^N(x0)`` with ``N`` the largest record time of the smallest eps
    that has one. The result satisfies
    ``h(f^k x0) <= -(tau_hat - eps) k + slack`` for ``1 <= k <= N``,
    which is checked (relative to ``h(x0)`` when ``x0`` is not the base
    point). ``meta`` carries the certificate and, for the disk
    and Euclidean ``p = 2`` spaces, the nearest boundary functional.
    """
    eps_schedule = [float(e) for e in eps_schedule]
    if not eps_schedule or min(eps_schedule) <= 0 or np.any(np.diff(eps_schedule) >= 0):
        raise ParameterError("eps schedule must be positive and strictly decreasing")
    if trace is None:
        trace = orbit(f, x0, horizon)
    tau_hat = drift(trace).tau_hat
    chosen = None
    for eps in eps_schedule:
        rec = record_times(trace, eps, tau_hat)
        if rec.size:
            chosen = (eps, int(rec[-1]), rec)
    if chosen is None:
        raise HorizonExhaustedError("no record time within the horizon")
    eps, N, rec = chosen
    space = trace.space
    anchor = trace.points[N]
    h = internal_functional(space, anchor)
    with space.context():
        ks = np.arange(1, N + 1)
        # measured from h(x0) so that orbits not started at the base point are covered
        vals = np.array([h(trace.points[k]) for k in ks]) - h(trace.x0)
    excess = vals + (tau_hat - eps) * ks
    certificate = float(excess.max())
    if certificate > slack * (1.0 + abs(trace.dists[N])):
        raise InvariantViolation(f"descent inequality fails by {certificate:.3g}")
    if probes is None:
        probes = space.sample(np.random.default_rng(seed), 20)
    meta = {"record_time": N, "eps": eps, "tau_hat": tau_hat, "n_records": int(rec.size),
            "certificate": certificate, "space": space}
    match = boundary_match(space, anchor, probes)
    if match is not None:
        meta["match"] = {"functional": match[0], "probe_error": match[1]}
    return MetricFunctional("Empirical", {"anchor": anchor, "record_time": N, "eps": eps},
                            h.func, meta=meta)


@dataclass(frozen=True)
class DescentReport:
    max_excess: float
    terminal_rate: float
    rates: np.ndarray = field(repr=False)
    min_lower_margin: float = 0.0
    upper_ok: bool = True
    terminal_ok: bool = True
    lower_ok: bool = True

    @property
    def passed(self) -> bool:
        return self.upper_ok and self.terminal_ok and self.lower_ok


def verify_descent(h: MetricFunctional, trace: OrbitTrace, tau: float, slack: float = ALGEBRAIC_TOL,
                   slack_rate: float = 0.0, k_max: int | None = None,
                   terminal_tol: float | None = None) -> DescentReport:
    """Check ``h(f^k x0) + tau k <= slack + slack_rate k`` and ``h(f^k x0) >= -a_k``.

    Values are taken relative to ``h(x0)``, which is 0 when the orbit
    starts at the base point. Also reports ``-h(f^k x0) / k``; its terminal value must lie within
    ``terminal_tol`` (default ``slack + slack_rate``) of ``tau``.
    """
    K = trace.horizon if k_max is None else min(int(k_max), trace.horizon)
    if K < 1:
        raise ParameterError("need at least one orbit step")
    ks = np.arange(1, K + 1)
    with trace.space.context():
        vals = np.array([h(trace.points[k]) for k in ks]) - h(trace.x0)
    excess = vals + tau * ks - slack_rate * ks
    rates = -vals / ks
    lower = vals + trace.dists[1:K + 1]
    if terminal_tol is None:
        terminal_tol = slack + slack_rate
    return DescentReport(
        max_excess=float(excess.max()),
        terminal_rate=float(rates[-1]),
        rates=rates,
        min_lower_margin=float(lower.min()),
        upper_ok=bool(excess.max() <= slack),
        terminal_ok=bool(abs(rates[-1] - tau) <= terminal_tol),
        lower_ok=bool(lower.min() >= -ALGEBRAIC_TOL * (1.0 + trace.dists[K])),
    )


@dataclass(frozen=True)
class TracialReport:
    difference: float
    tau_fg: float
    tau_gf: float
    fekete_gap: float
    bound: float
    passed: bool


def tracial_check(f: Semicontraction, g: Semicontraction, horizon: int = 1000) -> TracialReport:
    """Compare the drifts of ``f o g`` and ``g o f``.

    Passes when the difference is within ``max(2 * combined Fekete gap,
    C / n)`` with ``C`` the explicit constant
    ``D(x0, f x0) + D(x0, g x0) + D(x0, fg x0) + D(x0, gf x0)``.
    """
    if f.space is not g.space and f.space.describe() != g.space.describe():
        raise ParameterError("maps act on different spaces")
    fg, gf = f.compose(g), g.compose(f)
    run = matrix_orbit if fg.matrix is not None and hasattr(f.space, "base_dists") else orbit
    d_fg, d_gf = drift(run(fg, n=horizon)), drift(run(gf, n=horizon))
    space = f.space
    with space.context():
        x0 = space.base_point
        C = sum(max(space.dist(x0, m(x0)), space.dist(m(x0), x0)) for m in (f, g, fg, gf))
    diff = abs(d_fg.tau_hat - d_gf.tau_hat)
    gap = d_fg.fekete_gap + d_gf.fekete_gap
    bound = max(2 * gap, C / horizon)
    return TracialReport(diff, d_fg.tau_hat, d_gf.tau_hat, gap, bound, diff <= bound + 1e-12)


@dataclass(frozen=True)
class InverseBoundReport:
    min_margin: float
    tau_inverse: float
    anchor_time: int | None
    forward_max_excess: float
    lower_ok: bool
    passed: bool


def isometry_inverse_bound(f: Semicontraction, h: MetricFunctional | None = None,
                           horizon: int = 100, eps: float = 0.0, slack: float = 1e-6) -> InverseBoundReport:
    """Check ``h(f^-n x0) >= (tau(f^-1) - eps) n - slack`` along the backward orbit.

    Without ``h`` the functional is anchored at a time ``m`` where the
    forward orbit is closer (in the sense of ``a_m - (tau - eps) m``) to
    the base point than at any later time up to ``2 * horizon``; ``eps``
    must then be positive.
    """
    inv = f.inverted()
    back = orbit(inv, n=horizon)
    tau_inv = drift(back).tau_hat
    fwd = orbit(f, n=2 * horizon)
    tau_fwd = drift(fwd).tau_hat
    anchor_time = None
    if h is None:
        if not eps > 0:
            raise ParameterError("constructing the functional needs eps > 0")
        n = np.arange(fwd.horizon + 1)
        b = fwd.dists - (tau_fwd - eps) * n
        suffix_min = np.minimum.accumulate(b[::-1])[::-1]
        good = [m for m in range(horizon, -1, -1) if b[m] < suffix_min[m + 1]]
        if not good:
            raise HorizonExhaustedError("no forward time dominated by all later times")
        anchor_time = good[0]
        h = internal_functional(fwd.space, fwd.points[anchor_time])
    space = back.space
    ks = np.arange(1, horizon + 1)
    with space.context():
        vals = np.array([h(back.points[k]) for k in ks])
        fvals = np.array([h(fwd.points[k]) for k in ks])
    margins = vals - (tau_inv - eps) * ks
    lower_ok = bool(np.all(vals >= -back.dists[1:] - ALGEBRAIC_TOL * (1 + back.dists[1:])))
    forward_excess = float(np.max(fvals + tau_fwd * ks))
    return InverseBoundReport(float(margins.min()), tau_inv, anchor_time, forward_excess,
                              lower_ok, bool(margins.min() >= -slack and lower_ok))


# mean ergodic theorem ---------------------------------------------------------------------

@dataclass(frozen=True)
class MeanErgodicReport:
    projection: np.ndarray
    errors: np.ndarray = field(repr=False)
    rate_constant: float
    oracle_constant: float
    tau_hat: float
    tau_gap: float
    match_error: float | None
    functional: MetricFunctional | None = field(default=None, repr=False)


def invariant_projection(U) -> np.ndarray:
    """Orthogonal projection onto ``ker(U - I)`` from the eigen-decomposition of ``U``."""
    U = np.asarray(U, dtype=float)
    w, V = np.linalg.eig(U)
    fixed = V[:, np.abs(w - 1.0) < 1e-9]
    if fixed.shape[1] == 0:
        return np.zeros_like(U)
    span = np.concatenate([fixed.real, fixed.imag], axis=1)
    u, s, _ = np.linalg.svd(span, full_matrices=False)
    B = u[:, s > 1e-9 * s.max()]
    return B @ B.T


def geometric_sum_constant(U, v) -> float:
    """Sharp-in-form bound ``C`` with ``|sum_{k<n} U^k v - n P v| <= C`` for all ``n``.

    In a unitary eigenbasis ``v = sum c_j z_j``, the non-invariant part of the
    sum has norm ``sqrt(sum |c_j|^2 |1 - l_j^n|^2 / |1 - l_j|^2)``, at most
    ``sqrt(sum 4 |c_j|^2 / |1 - l_j|^2)``.
    """
    from scipy.linalg import schur

    T, Z = schur(np.asarray(U, dtype=complex), output="complex")
    lam = np.diag(T)
    c = Z.conj().T @ np.asarray(v, dtype=complex)
    moving = np.abs(lam - 1.0) >= 1e-9
    return float(np.sqrt(np.sum(4 * np.abs(c[moving]) ** 2 / np.abs(1 - lam[moving]) ** 2)))


def mean_ergodic(U, v, n: int = 10000, extraction_horizon: int | None = None,
                 probes=None, seed: int = 0) -> MeanErgodicReport:
    """Ergodic averages of ``f(w) = U w + v`` against the invariant projection.

    ``errors[k-1] = |(1/k) sum_{j<k} U^j v - P v|`` for ``k = 1..n``;
    ``rate_constant = max_k k errors[k-1]`` is compared with the
    eigenbasis bound ``oracle_constant``. When
    ``P v != 0`` the functional extracted from the orbit of ``f`` is matched
    against ``-(y, P v / |P v|)`` on ``probes``.
    """
    from .maps import affine
    from .spaces.euclidean import EuclideanSpace, linear_dual

    U = np.atleast_2d(np.asarray(U, dtype=float))
    v = np.asarray(v, dtype=float).ravel()
    if U.shape != (v.size, v.size):
        raise ParameterError("U must be square and match v")
    if np.max(np.abs(U.T @ U - np.eye(v.size))) > 1e-12:
        raise PreconditionError("U is not orthogonal")
    Pv = invariant_projection(U) @ v
    s = np.zeros_like(v)
    errors = np.empty(n)
    for k in range(1, n + 1):
        s = U @ s + v
        errors[k - 1] = np.linalg.norm(s / k - Pv)
    tau_hat = float(np.linalg.norm(s) / n)
    norm_pv = float(np.linalg.norm(Pv))
    ks = np.arange(1, n + 1)
    h = None
    match_error = None
    if norm_pv > 1e-12:
        space = EuclideanSpace(v.size)
        f = affine(space, U, v)
        H = extraction_horizon or min(n, 10000)
        h = extract_functional(f, horizon=H)
        if probes is None:
            probes = np.random.default_rng(seed).uniform(-1, 1, size=(20, v.size))
        target = linear_dual(Pv / norm_pv)
        match_error = float(max(abs(h(y) - target(y)) for y in probes))
    return MeanErgodicReport(Pv, errors, float(np.max(errors * ks)), geometric_sum_constant(U, v), tau_hat,
                             abs(tau_hat - norm_pv), match_error, h)
