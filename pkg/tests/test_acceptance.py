"""Exit criteria of the build, one test (or a small group) per criterion.

Each test asserts its stated tolerance and runtime bound. The terminal
summary prints one PASS/FAIL line per criterion (see ``conftest.py``).
"""
import math

import numpy as np
import pytest

from metspec import (
    CocycleDriver,
    compose_cocycle,
    curve_growth,
    dominant_curve,
    drift,
    extract_functional,
    km_record_times,
    mean_ergodic,
    orbit,
    top_lyapunov,
    verify_descent,
)
from metspec import maps
from metspec.checks import check_functional
from metspec.config import with_defaults
from metspec.experiments import run_experiment
from metspec.spaces import (
    EuclideanSpace,
    OperatorSpace,
    PoincareDisk,
    TorusTeich,
    disk_busemann,
    hilbert_functional,
    thurston_closed_form,
    thurston_enumerate,
)
from metspec.spectral import DEFAULT_EPS_SCHEDULE

GOLDEN_LOG = math.log((3 + math.sqrt(5)) / 2)


def _criterion(n, title):
    return pytest.mark.acceptance(criterion=n, title=title)


@_criterion(1, "drift exactness for a Euclidean translation")
def test_translation_drift_is_exact(stopwatch):
    space = EuclideanSpace(2)
    f = maps.translation(space, [3, 4])
    for n in (1, 2, 7, 100, 1000):
        d = drift(orbit(f, n=n))
        assert d.tau_hat == 5.0
        assert np.all(d.sequence == 5.0)
        assert np.all(d.fekete_inf == 5.0)
    assert stopwatch() < 1.0


@_criterion(2, "descending functional for a hyperbolic disk automorphism")
def test_spectral_principle_certificate(stopwatch):
    space = PoincareDisk()
    f = maps.mobius(space, np.array([[1, 0.5], [0.5, 1]]))
    trace = orbit(f, n=1000)
    tau_hat = drift(trace).tau_hat
    # oracle: log of the eigenvalue ratio (1 + 1/2) / (1 - 1/2)
    assert abs(tau_hat - math.log(3)) <= 1e-3
    h = extract_functional(f, eps_schedule=DEFAULT_EPS_SCHEDULE, trace=trace)
    eps = h.meta["eps"]
    assert eps >= 2.0 ** -10
    r = verify_descent(h, trace, tau_hat, slack=1e-9, slack_rate=eps, k_max=200, terminal_tol=1e-3)
    assert r.upper_ok, r.max_excess
    assert r.lower_ok and r.terminal_ok
    assert stopwatch() < 5.0


@_criterion(3, "Wolff-Denjoy orbits and Busemann functions")
def test_wolff_denjoy(stopwatch):
    space = PoincareDisk()
    family = maps.wolff_denjoy_family(space)
    assert len(family) == 5
    assert sum(f.label.startswith("blaschke") for f in family) == 2
    probes = space.sample(np.random.default_rng(3), 20)
    for f in family:
        zeta = f.oracle["boundary_point"]
        trace = orbit(f, n=1000)
        with trace.space.context():
            assert abs(complex(trace.points[-1]) - zeta) <= 1e-6
        h = extract_functional(f, trace=trace, probes=probes)
        B = disk_busemann(zeta, trace.space)
        with trace.space.context():
            err = max(abs(h(y) - B(y)) for y in probes)
        assert err <= 1e-3, (f.label, err)
    assert stopwatch() < 5.0


@_criterion(4, "mean ergodic theorem for rot(1) + I on R^3")
def test_mean_ergodic(stopwatch):
    c, s = math.cos(1.0), math.sin(1.0)
    U = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    n = 100_000
    r = mean_ergodic(U, [1, 0, 1], n)
    np.testing.assert_allclose(r.projection, [0, 0, 1], atol=1e-12)
    k = np.arange(1, n + 1)
    assert np.all(r.errors <= 3.0 / k)
    assert r.tau_gap <= 1e-4
    assert r.match_error <= 1e-3
    assert stopwatch() < 10.0


@_criterion(5, "Hilbert-space functional catalog in dimension 8")
def test_hilbert_catalog(stopwatch):
    space = EuclideanSpace(8)
    rng = np.random.default_rng(5)
    vs = []
    for _ in range(20):
        v = rng.normal(size=8)
        vs.append(v / np.linalg.norm(v) * rng.uniform() ** (1 / 8))
    count = 0
    for r in (0.0, 0.5, 1.0, 2.0, math.inf):
        for i, v in enumerate(vs):
            h = hilbert_functional(r, v)
            for res in check_functional(h, space, n=1000, seed=i, tol=1e-9, convex=True):
                assert res.passed, (r, i, res)
                count += 1
    assert count == 5 * 20 * 4
    assert stopwatch() < 10.0


@_criterion(6, "Thurston metric: enumeration against the closed form")
def test_thurston_enumeration_matches_closed_form(stopwatch):
    rng = np.random.default_rng(6)
    xs = rng.uniform(-1, 1, 100) + 1j * rng.uniform(0.5, 2, 100)
    ys = rng.uniform(-1, 1, 100) + 1j * rng.uniform(0.5, 2, 100)
    gaps = np.array([abs(thurston_enumerate(x, y, 50)[0] - thurston_closed_form(x, y)) for x, y in zip(xs, ys)])
    assert stopwatch() < 10.0
    assert gaps.max() <= 1e-6, f"max gap {gaps.max():.3g}; {np.mean(gaps > 1e-6):.0%} of pairs above 1e-6"


@_criterion(6, "Thurston metric: enumeration against the closed form")
def test_thurston_reference_value():
    value, curve = thurston_enumerate(1j, 2j, 50)
    assert abs(value - 0.5 * math.log(2)) <= 1e-9
    assert abs(thurston_closed_form(1j, 2j) - 0.5 * math.log(2)) <= 1e-9


def _torus_driver(matrix):
    return CocycleDriver("iid", [maps.mapping_class(TorusTeich(), matrix)], seed=0)


@_criterion(7, "curve growth under torus mapping classes")
def test_anosov_curve_growth_rate(stopwatch):
    g = curve_growth(compose_cocycle(_torus_driver([[2, 1], [1, 1]]), 60), (1, 0))
    assert stopwatch() < 1.0
    assert abs(g.terminal_rate - GOLDEN_LOG) < 1e-3, f"rate gap {abs(g.terminal_rate - GOLDEN_LOG):.3g} at k=60"


@_criterion(7, "curve growth under torus mapping classes")
def test_finite_order_curve_growth_rate(stopwatch):
    for M in ([[0, -1], [1, 0]], [[0, -1], [1, 1]], [[-1, 0], [0, -1]]):
        g = curve_growth(compose_cocycle(_torus_driver(M), 60), (1, 0))
        assert abs(g.terminal_rate) < 1e-6
    assert stopwatch() < 1.0


def _lyapunov(diagonals):
    space = OperatorSpace(2)
    family = [maps.left_multiplication(space, np.diag(d)) for d in diagonals]
    return top_lyapunov(CocycleDriver("iid", family, seed=1), 100_000)


@_criterion(8, "top Lyapunov exponent of i.i.d. diagonal products")
def test_lyapunov_exponents(stopwatch):
    # oracle: each coordinate is a random walk with mean increment log 2 and 0
    assert abs(_lyapunov([(4, 1), (1, 2)]).exponent - math.log(2)) <= 0.02
    # symmetric case: both coordinates have mean increment 0
    assert abs(_lyapunov([(2, 0.5), (0.5, 2)]).exponent) <= 0.02
    assert stopwatch() < 30.0


@_criterion(9, "cocycle record times on a random torus product")
def test_km_records_and_dominant_curve(stopwatch):
    T = TorusTeich()
    family = [maps.mapping_class(T, [[1, 1], [0, 1]]), maps.mapping_class(T, [[1, 0], [1, 1]])]
    tr = compose_cocycle(CocycleDriver("iid", family, seed=2024), 10_000)
    rec = km_record_times(tr, 0.1)
    assert rec.indices.size > 0
    dc = dominant_curve(tr, eps=0.1, records=rec)
    assert dc.record_time == rec.indices[-1]
    assert dc.lower_bound_ok, dc.lower_bound_margin
    assert stopwatch() < 60.0


SPACES = [
    {"type": "euclidean", "dim": 3},
    {"type": "euclidean", "dim": 2, "p": 1},
    {"type": "euclidean", "dim": 2, "p": "inf"},
    {"type": "cone", "dim": 3},
    {"type": "cone", "dim": 2, "variant": "thompson"},
    {"type": "operator", "dim": 2},
    {"type": "operator", "dim": 3},
    {"type": "torus"},
    {"type": "poincare-disk"},
]


@_criterion(10, "invariant suites across the space and map zoo")
def test_invariant_suites(stopwatch):
    failures = {}
    for space in SPACES:
        cfg = with_defaults({"schema_version": 1, "experiment": "invariants", "space": space, "seed": 7})
        rep = run_experiment(cfg)
        names = {c["name"].split("[")[0].split(":")[0] for c in rep.checks}
        assert {"triangle", "semicontraction", "subadditivity", "tau_below_displacement"} <= names, names
        assert "tracial" in names, (space, names)
        if not rep.passed:
            failures[str(space)] = rep.failed
    assert not failures, failures
    assert stopwatch() < 60.0
