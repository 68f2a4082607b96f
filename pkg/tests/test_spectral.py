import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metspec import (
    BoxWindow,
    DiskWindow,
    Semicontraction,
    classify,
    drift,
    extract_functional,
    isometry_inverse_bound,
    matrix_orbit,
    mean_ergodic,
    min_displacement,
    orbit,
    record_times,
    search_displacement,
    tracial_check,
    verify_descent,
)
from metspec import maps
from metspec.exceptions import (
    InvariantViolation,
    ParameterError,
    PreconditionError,
    PropagationError,
    UnsupportedMapError,
)
from metspec.spaces import EuclideanSpace, PoincareDisk, PositiveCone, disk_busemann, linear_dual
from metspec.spectral import geometric_sum_constant, invariant_projection

R1, R2, R3 = EuclideanSpace(1), EuclideanSpace(2), EuclideanSpace(3)
LOG3 = math.log(3)


@pytest.fixture(scope="module")
def disk():
    return PoincareDisk()


@pytest.fixture(scope="module")
def hyperbolic(disk):
    return maps.mobius(disk, np.array([[1, 0.5], [0.5, 1]]))


@pytest.fixture(scope="module")
def hyperbolic_trace(hyperbolic):
    return orbit(hyperbolic, n=1000)


# orbits and drift ------------------------------------------------------------------------

def test_orbit_examples():
    assert orbit(maps.translation(R1, [1.0]), n=5).dists.tolist() == [0, 1, 2, 3, 4, 5]
    tr = orbit(maps.rotation(R2, 1.0), x0=[1.0, 0.0], n=50)
    k = np.arange(51)
    np.testing.assert_allclose(tr.dists, np.abs(2 * np.sin(k / 2)), atol=1e-12)
    tr = orbit(maps.scaling(R1, 0.5), x0=[1.0], n=30)
    np.testing.assert_allclose(tr.dists, 1 - 2.0 ** -k[:31], atol=1e-15)


def test_orbit_reports_the_failing_step():
    cone = PositiveCone(1)
    f = Semicontraction(cone, lambda x: np.asarray(x) - 1.0, "shift-down")
    with pytest.raises(PropagationError) as err:
        orbit(f, x0=[3.5], n=10, check=False)
    assert err.value.step == 4
    with pytest.raises(ParameterError):
        orbit(f, n=0)


def test_orbit_flags_expanding_maps():
    with pytest.raises(InvariantViolation):
        orbit(Semicontraction(R1, lambda x: 2 * np.asarray(x), "double"), x0=[1.0], n=20)


def test_drift_examples(hyperbolic_trace):
    for n in (1, 10, 1000):
        assert drift(orbit(maps.translation(R3, [1, 2, 2]), n=n)).tau_hat == 3.0
    rot = drift(orbit(maps.rotation(R2, 1.0), x0=[1.0, 0.0], n=1000))
    assert rot.tau_hat <= 2 / 1000
    d = drift(hyperbolic_trace)
    assert abs(d.tau_hat - LOG3) < 1e-3
    assert d.oracle_tau == pytest.approx(LOG3, abs=1e-12)
    assert np.all(np.diff(d.fekete_inf) <= 0)
    assert d.fekete_inf[-1] <= d.tau_hat


def test_oracle_drift_converges_at_long_horizon(disk):
    for f in (maps.hyperbolic_mobius(disk, 0.3), maps.random_mobius(disk, np.random.default_rng(0))):
        d = drift(matrix_orbit(f, n=10_000))
        assert abs(d.fekete_inf[-1] - f.oracle["tau"]) < 1e-3


def test_matrix_orbit_agrees_with_pointwise_orbit(hyperbolic):
    a = orbit(hyperbolic, n=200).dists
    b = matrix_orbit(hyperbolic, n=200).dists
    np.testing.assert_allclose(a, b, atol=1e-9)
    with pytest.raises(UnsupportedMapError):
        matrix_orbit(maps.disk_power(hyperbolic.space, 2), n=5)


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3), st.integers(2, 60))
def test_traces_are_subadditive(c, n):
    tr = orbit(maps.translation(R3, c), n=n)
    a = tr.dists
    for m in range(1, n):
        for k in range(1, n - m + 1):
            assert a[m + k] <= a[m] + a[k] + 1e-9 * (1 + a[m + k])


# displacement and classification ---------------------------------------------------------

def test_min_displacement_examples(disk):
    box = BoxWindow([-3, -3], [3, 3])
    assert min_displacement(maps.translation(R2, [3, 4]), box) == pytest.approx(5.0, abs=1e-12)
    assert min_displacement(maps.rotation(R2, 1.0), box) < 1e-3
    # parabolic: displacement decreases toward the boundary fixed point along the radius
    f = maps.parabolic_mobius(disk)
    with disk.context():
        vals = [disk.dist(r, f(r)) for r in (0.0, 0.5, 0.9, 0.99, 0.999)]
    assert all(v > 0 for v in vals)
    assert np.all(np.diff(vals) < 0)
    with pytest.raises(ParameterError):
        search_displacement(f, None)


def test_classify_examples(disk, hyperbolic):
    window = DiskWindow(0.99)
    assert classify(maps.disk_rotation(disk, 1.0), window).kind == "elliptic"
    c = classify(hyperbolic, window)
    assert c.kind == "hyperbolic"
    assert abs(c.tau_hat - LOG3) < 0.02
    assert c.evidence["consistent"]
    p = classify(maps.parabolic_mobius(disk), window)
    assert p.kind == "parabolic"
    assert p.evidence["consistent"]
    # finite-horizon drift of a parabolic map is O(log n / n)
    assert p.tau_hat < 2 * math.log(200) / 200 + 0.01


def test_tau_below_displacement(disk):
    box = BoxWindow([-2, -2], [2, 2])
    cases = [(maps.translation(R2, [1, 1]), box), (maps.rotation(R2, 0.5), box),
             (maps.hyperbolic_mobius(disk, 0.6, 1.0), DiskWindow()), (maps.parabolic_mobius(disk), DiskWindow())]
    for f, window in cases:
        n = 200
        tr = orbit(f, n=n)
        tau = drift(tr).tau_hat
        s = search_displacement(f, window, n_random=200, n_local=200)
        space = tr.space
        with space.context():
            x = space.validate(s.point)
            reach = max(space.dist(tr.x0, x), space.dist(x, tr.x0))
        # a_n(x0) <= a_n(x) + 2 D(x0, x) and a_n(x) <= n d(x, f x)
        assert tau <= s.value + 2 * reach / n + 1e-9


# record times and the descending functional ----------------------------------------------

def test_record_time_examples(hyperbolic_trace):
    tr = orbit(maps.translation(R1, [1.0]), n=50)
    assert record_times(tr, 0.1).tolist() == list(range(1, 51))
    rot = orbit(maps.rotation(R2, 1.0), x0=[1.0, 0.0], n=300)
    rec = record_times(rot, 0.1, tau_hat=0.0)
    assert rec.size > 50 and rec[-1] > 290
    rec = record_times(hyperbolic_trace, 0.01)
    assert rec.size > 0 and rec[-1] >= 990
    with pytest.raises(ParameterError):
        record_times(tr, 0.0)


def test_extract_functional_translation():
    f = maps.translation(R2, [3, 4])
    h = extract_functional(f, horizon=2000)
    target = linear_dual([0.6, 0.8])
    probes = np.random.default_rng(1).uniform(-1, 1, (20, 2))
    assert max(abs(h(y) - target(y)) for y in probes) < 1e-3
    assert h.meta["match"]["functional"].tag == "LinearDual"
    tr = orbit(f, n=200)
    assert np.all([h(p) + 5 * k <= 1e-9 for k, p in enumerate(tr.points)])


def test_extract_functional_disk_busemann(hyperbolic, hyperbolic_trace):
    probes = hyperbolic.space.sample(np.random.default_rng(2), 20)
    h = extract_functional(hyperbolic, trace=hyperbolic_trace, probes=probes)
    B = disk_busemann(1.0, hyperbolic_trace.space)
    with hyperbolic_trace.space.context():
        assert max(abs(h(y) - B(y)) for y in probes) < 1e-3
    assert h.meta["certificate"] <= 1e-9 * (1 + hyperbolic_trace.dists[h.meta["record_time"]])


def test_extract_functional_zero_drift():
    f = maps.rotation(R2, 1.0)
    tr = orbit(f, x0=[1.0, 0.0], n=300)
    h = extract_functional(f, trace=tr)
    eps = h.meta["eps"]
    h0 = h(tr.x0)
    N = h.meta["record_time"]
    assert all(h(p) - h0 <= 1e-9 + (eps - h.meta["tau_hat"]) * k for k, p in enumerate(tr.points[:N + 1]))


def test_extract_functional_errors():
    f = maps.translation(R1, [1.0])
    with pytest.raises(ParameterError):
        extract_functional(f, eps_schedule=[0.1, 0.2], horizon=10)


def test_verify_descent_examples(hyperbolic, hyperbolic_trace):
    tr = orbit(maps.translation(R1, [1.0]), n=100)
    r = verify_descent(linear_dual([1.0]), tr, 1.0, slack=0.0)
    assert r.max_excess == 0.0 and r.passed
    h = extract_functional(hyperbolic, trace=hyperbolic_trace)
    r = verify_descent(h, hyperbolic_trace, LOG3, slack=1e-9, slack_rate=h.meta["eps"], k_max=200,
                       terminal_tol=1e-3)
    assert abs(r.terminal_rate - LOG3) < 1e-3
    assert r.lower_ok
    # the lower bound h >= -a_k holds for any functional
    for anchor in hyperbolic.space.sample(np.random.default_rng(3), 5):
        g = disk_busemann(anchor / abs(anchor), hyperbolic_trace.space)
        assert verify_descent(g, hyperbolic_trace, 0.0, slack=1e9, k_max=300).lower_ok


# tracial property and inverse bound ------------------------------------------------------

def test_tracial_examples(disk):
    f = maps.translation(R2, [1, 2])
    assert tracial_check(f, f, 50).difference == 0.0
    g = maps.translation(R2, [-3, 0.5])
    r = tracial_check(f, g, 100)
    assert r.tau_fg == pytest.approx(np.linalg.norm([-2, 2.5]), abs=1e-12)
    assert r.tau_gf == pytest.approx(r.tau_fg, abs=1e-12)
    rng = np.random.default_rng(4)
    for _ in range(3):
        a, b = maps.random_mobius(disk, rng), maps.random_mobius(disk, rng)
        r = tracial_check(a, b, 10_000)
        assert r.difference < 1e-3 and r.passed
    with pytest.raises(ParameterError):
        tracial_check(f, maps.translation(R3, [1, 0, 0]))


def test_inverse_bound_examples(hyperbolic):
    f = maps.translation(R2, [3, 4])
    r = isometry_inverse_bound(f, linear_dual([0.6, 0.8]), horizon=50, slack=0.0)
    assert r.passed and r.min_margin == pytest.approx(0.0, abs=1e-12)
    r = isometry_inverse_bound(hyperbolic, disk_busemann(1.0), horizon=100, slack=1e-6)
    assert r.passed
    r = isometry_inverse_bound(hyperbolic, horizon=100, eps=1e-3)
    assert r.passed and r.anchor_time is not None
    rot = maps.rotation(R2, 1.0)
    r = isometry_inverse_bound(rot, linear_dual([1.0, 0.0]), horizon=50, eps=0.05)
    assert r.lower_ok
    with pytest.raises(UnsupportedMapError):
        isometry_inverse_bound(maps.scaling(R2, 0.5), linear_dual([1.0, 0.0]))
    with pytest.raises(ParameterError):
        isometry_inverse_bound(f, horizon=10)


# mean ergodic theorem ---------------------------------------------------------------------

def test_mean_ergodic_identity():
    r = mean_ergodic(np.eye(3), [1, 2, 2], 100)
    np.testing.assert_allclose(r.projection, [1, 2, 2])
    assert r.rate_constant == 0.0
    assert r.tau_gap < 1e-12


def test_mean_ergodic_plane_rotation():
    c, s = math.cos(1.0), math.sin(1.0)
    U = np.array([[c, -s], [s, c]])
    r = mean_ergodic(U, [1, 0], 5000)
    np.testing.assert_allclose(r.projection, 0, atol=1e-15)
    # oracle: |sum_{k<n} U^k v| = |sin(n/2)| / |sin(1/2)|
    n = np.arange(1, 5001)
    np.testing.assert_allclose(r.errors * n, np.abs(np.sin(n / 2) / math.sin(0.5)), atol=1e-9)
    assert r.rate_constant <= geometric_sum_constant(U, [1, 0]) + 1e-9
    assert r.match_error is None


def test_mean_ergodic_rejects_non_orthogonal():
    with pytest.raises(PreconditionError):
        mean_ergodic(np.array([[1, 1], [0, 1]]), [1, 0], 10)


@given(st.floats(0.1, 3.0), st.lists(st.floats(-3, 3), min_size=3, max_size=3))
def test_geometric_sum_constant_bounds_the_averages(theta, v):
    c, s = math.cos(theta), math.sin(theta)
    U = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    P = invariant_projection(U)
    np.testing.assert_allclose(P, np.diag([0, 0, 1]), atol=1e-12)
    C = geometric_sum_constant(U, v)
    v = np.array(v)
    acc = np.zeros(3)
    for n in range(1, 200):
        acc = U @ acc + v
        assert np.linalg.norm(acc - n * P @ v) <= C + 1e-9
