"""Named experiments run from a validated configuration.

Each experiment returns a :class:`Report` holding estimates (value,
tolerance, oracle, source operation), pass/fail checks and tables. The
report contents depend only on the configuration, so repeated runs give
identical files.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import maps as M
from .checks import check_functional, check_semicontraction, check_separation, check_triangle
from .config import SCHEMA_VERSION
from .core import internal_functional
from .ergodic import CocycleDriver, compose_cocycle, curve_growth, dominant_curve, km_record_times, top_lyapunov
from .exceptions import HorizonExhaustedError, MetSpecError, ParameterError
from .spaces import (
    EuclideanSpace,
    OperatorSpace,
    PoincareDisk,
    PositiveCone,
    TorusTeich,
    disk_busemann,
    hilbert_functional,
    linear_dual,
    thurston_closed_form,
    thurston_enumerate,
    torus_point,
)
from .spectral import (
    drift,
    extract_functional,
    matrix_orbit,
    mean_ergodic,
    orbit,
    record_times,
    tracial_check,
    verify_descent,
)

RANDOM_GROWTH_TOL = 0.02
MAX_RECORD_HORIZON = 20000


# builders ----------------------------------------------------------------------------

def _c(x) -> complex:
    return complex(*x) if isinstance(x, (list, tuple)) else complex(x)


def _cmatrix(rows) -> np.ndarray:
    return np.array([[_c(x) for x in row] for row in rows])


def _rmatrix(rows) -> np.ndarray:
    m = _cmatrix(rows)
    if np.any(m.imag != 0):
        raise ParameterError("expected a real matrix")
    return m.real


def build_space(desc: dict | None, default: str = "euclidean"):
    desc = desc or {"type": default}
    kind = desc["type"]
    if kind == "euclidean":
        p = desc.get("p", 2)
        return EuclideanSpace(desc.get("dim", 2), math.inf if p == "inf" else float(p))
    if kind == "poincare-disk":
        return PoincareDisk(desc.get("dps", 30))
    if kind == "cone":
        return PositiveCone(desc.get("dim", 2), desc.get("variant", "funk"))
    if kind == "operator":
        return OperatorSpace(desc.get("dim", 2))
    if kind == "torus":
        return TorusTeich()
    raise ParameterError(f"unknown space {kind!r}")


def build_map(desc: dict, space):
    kind = desc["type"]
    if kind == "translation":
        return M.translation(space, desc["c"])
    if kind == "rotation":
        return M.rotation(space, desc["angle"], tuple(desc.get("plane", (0, 1))))
    if kind == "affine":
        return M.affine(space, _rmatrix(desc["U"]), desc["v"])
    if kind == "scaling":
        return M.scaling(space, desc["factor"], desc.get("center"))
    if kind == "mobius":
        return M.mobius(space, _cmatrix(desc["matrix"]))
    if kind == "hyperbolic":
        return M.hyperbolic_mobius(space, desc.get("t", 0.5), desc.get("angle", 0.0))
    if kind == "parabolic":
        return M.parabolic_mobius(space)
    if kind == "disk-rotation":
        return M.disk_rotation(space, desc["angle"])
    if kind == "power":
        return M.disk_power(space, desc.get("k", 2))
    if kind == "blaschke":
        return M.blaschke(space, [_c(z) for z in desc["zeros"]], _c(desc.get("boundary_point", 1.0)))
    if kind == "cone-linear":
        return M.cone_linear(space, _rmatrix(desc["matrix"]))
    if kind == "left-mult":
        return M.left_multiplication(space, _rmatrix(desc["matrix"]))
    if kind == "mapping-class":
        return M.mapping_class(space, np.array(desc["matrix"]))
    raise ParameterError(f"unknown map {kind!r}")


_MAP_SPACE = {"translation": "euclidean", "rotation": "euclidean", "affine": "euclidean",
              "scaling": "euclidean", "mobius": "poincare-disk", "hyperbolic": "poincare-disk",
              "parabolic": "poincare-disk", "disk-rotation": "poincare-disk", "power": "poincare-disk",
              "blaschke": "poincare-disk", "cone-linear": "cone", "left-mult": "operator",
              "mapping-class": "torus"}


def _space_for(cfg, map_descs):
    if "space" in cfg:
        return build_space(cfg["space"])
    first = map_descs[0]
    kind = _MAP_SPACE[first["type"]]
    desc = {"type": kind}
    if kind in ("euclidean", "cone", "operator"):
        if "c" in first:
            desc["dim"] = len(first["c"])
        elif "matrix" in first:
            desc["dim"] = len(first["matrix"])
        elif "U" in first:
            desc["dim"] = len(first["U"])
    return build_space(desc)


def build_driver(cfg) -> CocycleDriver:
    d = cfg["driver"]
    space = _space_for(cfg, d["family"])
    family = [build_map(m, space) for m in d["family"]]
    return CocycleDriver(d["kind"], family, seed=cfg["seed"], weights=d.get("weights"),
                         transition=d.get("transition"), angle=d.get("angle"),
                         cuts=tuple(d["cuts"]) if "cuts" in d else None)


def _single_map(cfg):
    if "map" not in cfg:
        raise ParameterError("this experiment needs a 'map'")
    space = _space_for(cfg, [cfg["map"]])
    return build_map(cfg["map"], space)


# report -------------------------------------------------------------------------------

@dataclass
class Report:
    experiment: str
    config: dict
    estimates: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)

    def estimate(self, name, value, source, tolerance=None, oracle=None):
        self.estimates.append({"name": name, "value": value, "source": source,
                               "tolerance": tolerance, "oracle": oracle})

    def check(self, name, passed, value, tolerance, source, oracle=None):
        self.checks.append({"name": name, "passed": bool(passed), "value": value,
                            "tolerance": tolerance, "source": source, "oracle": oracle})

    def add_result(self, result, source):
        self.check(result.name, result.passed, result.worst, result.tol, source,
                   oracle=f"{result.n} sampled cases")

    def table(self, name, header, rows):
        self.tables[name] = (list(header), rows)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    @property
    def failed(self) -> list:
        return [c["name"] for c in self.checks if not c["passed"]]

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "experiment": self.experiment, "config": self.config,
                "estimates": self.estimates, "checks": self.checks, "passed": self.passed,
                "failed": self.failed}


def _fixed_point_constant(f, trace) -> float:
    """``2 d(x0, p)`` when the oracle knows a fixed point ``p``, which bounds ``a_n``."""
    p = f.oracle.get("fixed_point")
    if p is None:
        return 0.0
    space = trace.space
    with space.context():
        p = space.validate(p)
        return 2.0 * max(space.dist(trace.x0, p), space.dist(p, trace.x0))


def _trace_rows(trace, eps, tau_hat, h):
    n = np.arange(trace.horizon + 1)
    b = trace.dists - (tau_hat - eps) * n
    rec = np.zeros(trace.horizon + 1, dtype=bool)
    rec[record_times(trace, eps, tau_hat)] = True
    hv = [None] * len(n)
    if h is not None and trace.points:
        with trace.space.context():
            hv = [h(p) for p in trace.points]
    ratio = [None] + list(trace.dists[1:] / n[1:])
    return [(int(k), trace.dists[k], ratio[k], b[k], rec[k], hv[k]) for k in n]


TRACE_HEADER = ("k", "a_k", "a_k_over_k", "b_k", "record", "h_k")


# experiments --------------------------------------------------------------------------

def exp_drift(cfg, rep: Report):
    tol = cfg["tolerances"]
    f = _single_map(cfg)
    trace = orbit(f, n=cfg["horizon"], tol=tol["algebraic"])
    d = drift(trace)
    src = "spectral.drift"
    rep.estimate("tau_hat", d.tau_hat, src, oracle=f.oracle.get("provenance"))
    rep.estimate("fekete_inf", float(d.fekete_inf[-1]), src)
    rep.check("subadditivity", True, trace.checks["subadditivity_excess"], tol["algebraic"], "spectral.orbit")
    rep.check("step_distances_non_increasing", True, trace.checks["step_increase"], tol["algebraic"],
              "spectral.orbit")
    rep.check("fekete_inf_non_increasing", bool(np.all(np.diff(d.fekete_inf) <= 0)), 0.0, 0.0, src)
    if "tau" in f.oracle:
        bound = max(tol["ergodic"], _fixed_point_constant(f, trace) / trace.horizon)
        rep.estimate("tau_oracle", f.oracle["tau"], "maps", oracle=f.oracle.get("provenance"))
        rep.check("tau_hat_vs_oracle", d.oracle_gap <= bound, d.oracle_gap, bound, src,
                  oracle=f.oracle.get("provenance"))
    eps = cfg["params"].get("eps", min(cfg["eps_schedule"]))
    try:
        h = extract_functional(f, eps_schedule=cfg["eps_schedule"], trace=trace)
    except HorizonExhaustedError:
        h = None
    rep.table("trace", TRACE_HEADER, _trace_rows(trace, eps, d.tau_hat, h))


def exp_functional(cfg, rep: Report):
    tol = cfg["tolerances"]
    f = _single_map(cfg)
    trace = orbit(f, n=cfg["horizon"], tol=tol["algebraic"])
    tau_hat = drift(trace).tau_hat
    probes = trace.space.sample(np.random.default_rng(cfg["seed"]), cfg["params"].get("probes", 20))
    h = extract_functional(f, eps_schedule=cfg["eps_schedule"], trace=trace, probes=probes,
                           slack=tol["algebraic"])
    eps = h.meta["eps"]
    K = min(cfg["params"].get("k_check", 200), trace.horizon)
    r = verify_descent(h, trace, tau_hat, slack=tol["algebraic"], slack_rate=eps, k_max=K,
                       terminal_tol=tol["ergodic"])
    src = "spectral.verify_descent"
    rep.estimate("tau_hat", tau_hat, "spectral.drift", oracle=f.oracle.get("provenance"))
    rep.estimate("record_time", h.meta["record_time"], "spectral.extract_functional")
    rep.estimate("eps", eps, "spectral.extract_functional")
    rep.estimate("certificate", h.meta["certificate"], "spectral.extract_functional", tol["algebraic"])
    rep.check("descent_upper", r.upper_ok, r.max_excess, tol["algebraic"], src,
              oracle="h(f^k x0) + tau_hat k <= eps k")
    rep.check("descent_terminal_rate", r.terminal_ok, abs(r.terminal_rate - tau_hat), tol["ergodic"], src)
    rep.check("descent_lower", r.lower_ok, r.min_lower_margin, tol["algebraic"], src,
              oracle="h(f^k x0) >= -a_k")
    if "tau" in f.oracle:
        gap = abs(tau_hat - f.oracle["tau"])
        rep.check("tau_hat_vs_oracle", gap <= tol["ergodic"], gap, tol["ergodic"], "spectral.drift",
                  oracle=f.oracle.get("provenance"))
    if "match" in h.meta:
        match = h.meta["match"]
        rep.estimate("catalog_match", match["functional"].to_dict(trace.space), "spectral.boundary_match")
        rep.estimate("catalog_probe_error", match["probe_error"], "spectral.boundary_match", tol["ergodic"])
        if "boundary_point" in f.oracle:
            rep.check("catalog_match_error", match["probe_error"] <= tol["ergodic"], match["probe_error"],
                      tol["ergodic"], "spectral.boundary_match", oracle="closed-form Busemann function")
    rep.table("trace", TRACE_HEADER, _trace_rows(trace, eps, tau_hat, h))


def exp_wolff_denjoy(cfg, rep: Report):
    tol = cfg["tolerances"]
    space = build_space(cfg.get("space"), "poincare-disk")
    if not isinstance(space, PoincareDisk):
        raise ParameterError("wolff-denjoy runs on the Poincaré disk")
    if "maps" in cfg:
        family = [build_map(m, space) for m in cfg["maps"]]
    elif "map" in cfg:
        family = [build_map(cfg["map"], space)]
    else:
        family = M.wolff_denjoy_family(space)
    probes = space.sample(np.random.default_rng(cfg["seed"]), cfg["params"].get("probes", 20))
    rows = []
    for i, f in enumerate(family):
        name = f"{i}:{f.label}"
        zeta = f.oracle.get("boundary_point")
        if zeta is None:
            rep.check(f"{name}:has_boundary_oracle", False, None, None, "maps")
            continue
        trace = orbit(f, n=cfg["horizon"], tol=tol["algebraic"])
        tau_hat = drift(trace).tau_hat
        with trace.space.context():
            dist = float(abs(trace.points[-1] - zeta))
        h = extract_functional(f, eps_schedule=cfg["eps_schedule"], trace=trace, probes=probes)
        B = disk_busemann(zeta, trace.space)
        with trace.space.context():
            err = max(abs(h(y) - B(y)) for y in probes)
        rep.estimate(f"{name}:boundary_point", zeta, "maps", oracle=f.oracle.get("provenance"))
        rep.estimate(f"{name}:tau_hat", tau_hat, "spectral.drift", oracle=f.oracle.get("tau"))
        rep.check(f"{name}:orbit_to_boundary", dist <= tol["geometric"], dist, tol["geometric"],
                  "spectral.orbit", oracle="boundary fixed point")
        rep.check(f"{name}:busemann_match", err <= tol["ergodic"], err, tol["ergodic"],
                  "spectral.extract_functional", oracle="closed-form Busemann function")
        if "tau" in f.oracle:
            gap = abs(tau_hat - f.oracle["tau"])
            rep.check(f"{name}:tau_hat_vs_oracle", gap <= tol["ergodic"], gap, tol["ergodic"], "spectral.drift",
                      oracle=f.oracle.get("provenance"))
        rows.append((f.label, zeta.real, zeta.imag, dist, tau_hat, f.oracle.get("tau"), err,
                     h.meta["record_time"]))
    rep.table("summary", ("map", "zeta_re", "zeta_im", "final_distance", "tau_hat", "tau_oracle",
                          "probe_error", "record_time"), rows)


def exp_mean_ergodic(cfg, rep: Report):
    tol = cfg["tolerances"]
    p = cfg["params"]
    n = cfg["horizon"]
    r = mean_ergodic(_rmatrix(p["U"]), p["v"], n, extraction_horizon=p.get("extraction_horizon"),
                     seed=cfg["seed"])
    src = "spectral.mean_ergodic"
    bound = p.get("rate_bound", r.oracle_constant * (1 + 1e-9))
    rep.estimate("projection", r.projection, src, oracle="eigen-decomposition of U")
    rep.estimate("tau_hat", r.tau_hat, src, oracle="norm of the projection")
    rep.estimate("rate_constant", r.rate_constant, src, oracle="max_k k |A_k - Pv|")
    rep.estimate("oracle_constant", r.oracle_constant, "spectral.geometric_sum_constant")
    rep.check("average_rate", r.rate_constant <= bound, r.rate_constant, bound, src,
              oracle="|A_n - Pv| <= C / n for all n")
    tau_tol = p.get("tau_tol", tol["ergodic"])
    rep.check("tau_hat_vs_projection", r.tau_gap <= tau_tol, r.tau_gap, tau_tol, src)
    if r.match_error is not None:
        rep.check("linear_dual_match", r.match_error <= tol["ergodic"], r.match_error, tol["ergodic"], src,
                  oracle="-(y, Pv / |Pv|)")
    k = np.arange(1, n + 1)
    rep.table("averages", ("k", "error", "k_times_error"),
              list(zip(k.tolist(), r.errors.tolist(), (k * r.errors).tolist())))


def _cocycle_rows(tr, records=None, curves=()):
    n = np.arange(tr.horizon + 1)
    rec = np.zeros(tr.horizon + 1, dtype=bool)
    if records is not None:
        rec[records.indices] = True
    cols = []
    from .spaces.torus import log_lengths
    for alpha in curves:
        cols.append(log_lengths(tr.log_scales, tr.stack, alpha))
    ratio = [None] + list(tr.a[1:] / n[1:])
    return [(int(k), tr.a[k], ratio[k], rec[k], *[c[k] for c in cols]) for k in n]


def exp_lyapunov(cfg, rep: Report):
    tol = cfg["tolerances"]
    driver = build_driver(cfg)
    if not isinstance(driver.space, OperatorSpace):
        raise ParameterError("lyapunov needs left multiplications on an operator space")
    est = top_lyapunov(driver, cfg["horizon"])
    src = "ergodic.top_lyapunov"
    rep.estimate("exponent", est.exponent, src, tolerance=est.clt_tol, oracle="4 sigma / sqrt(n) width")
    rep.estimate("fekete_inf", float(est.fekete_inf[-1]), src)
    rep.estimate("block_sigma", est.block_sigma, src)
    if "expected" in cfg["params"]:
        width = max(est.clt_tol, tol["ergodic"])
        gap = abs(est.exponent - cfg["params"]["expected"])
        rep.check("exponent_vs_expected", gap <= width, gap, width, src, oracle="configured value")
    tr = compose_cocycle(driver, min(cfg["horizon"], 2000))
    rep.table("cocycle", ("k", "a_k", "a_k_over_k", "record"), _cocycle_rows(tr))


def exp_thurston(cfg, rep: Report):
    tol = cfg["tolerances"]
    p = cfg["params"]
    N = p.get("N", 50)
    re_max, im_lo, im_hi = p.get("window", (1.0, 0.5, 2.0))
    rng = np.random.default_rng(cfg["seed"])
    n_pairs = p.get("pairs", 100)
    xs = rng.uniform(-re_max, re_max, n_pairs) + 1j * rng.uniform(im_lo, im_hi, n_pairs)
    ys = rng.uniform(-re_max, re_max, n_pairs) + 1j * rng.uniform(im_lo, im_hi, n_pairs)
    rows, gaps, asym, mono = [], [], [], []
    for x, y in zip(xs, ys):
        e, (a, b) = thurston_enumerate(x, y, N)
        c = thurston_closed_form(x, y)
        gaps.append(c - e)
        asym.append(abs(c - thurston_closed_form(y, x)))
        mono.append(thurston_enumerate(x, y, max(N // 2, 1))[0] - e)
        rows.append((x.real, x.imag, y.real, y.imag, e, c, c - e, a, b))
    gaps = np.array(gaps)
    src = "spaces.thurston_dist"
    rep.estimate("max_gap", float(gaps.max()), src, tol["geometric"], oracle="generalized eigenvalue")
    rep.estimate("median_gap", float(np.median(gaps)), src)
    rep.estimate("fraction_above_tolerance", float(np.mean(gaps > tol["geometric"])), src)
    rep.check("enumerate_vs_closed_form", gaps.max() <= tol["geometric"], float(gaps.max()), tol["geometric"],
              src, oracle="generalized eigenvalue")
    rep.check("enumerate_below_closed_form", gaps.min() >= -tol["algebraic"], float(-gaps.min()),
              tol["algebraic"], src)
    rep.check("enumerate_monotone_in_N", max(mono) <= tol["algebraic"], float(max(mono)), tol["algebraic"], src)
    rep.check("symmetric_on_torus", max(asym) <= tol["algebraic"], float(max(asym)), tol["algebraic"], src)
    ref, curve = thurston_enumerate(1j, 2j, N)
    err = abs(ref - 0.5 * math.log(2))
    rep.estimate("L(i,2i)", ref, src, tol["algebraic"], oracle="(1/2) log 2")
    rep.estimate("L(i,2i)_curve", list(curve), src)
    rep.check("L(i,2i)", err <= tol["algebraic"] and curve == (0, 1), err, tol["algebraic"], src,
              oracle="(1/2) log 2 at (0, 1)")
    tri = check_triangle(TorusTeich(), n=min(cfg["samples"], 1000), seed=cfg["seed"], tol=tol["algebraic"])
    rep.add_result(tri, "spaces.TorusTeich")
    rep.table("pairs", ("x_re", "x_im", "y_re", "y_im", "enumerate", "closed_form", "gap", "p", "q"), rows)


def exp_curve_growth(cfg, rep: Report):
    tol = cfg["tolerances"]
    p = cfg["params"]
    driver = build_driver(cfg)
    if not isinstance(driver.space, TorusTeich):
        raise ParameterError("curve-growth needs mapping classes on the torus")
    n = cfg["horizon"]
    tr = compose_cocycle(driver, n)
    alpha = tuple(p.get("alpha", (1, 0)))
    g = curve_growth(tr, alpha)
    src = "ergodic.curve_growth"
    rep.estimate("tau_hat", g.tau_hat, src)
    rep.estimate("rate", g.terminal_rate, src, oracle="(1/k) log l_{Z_k x0}(alpha)")
    rep.estimate("increment_rate", float(g.increments[-1]), src, oracle="log l_k - log l_{k-1}")
    deterministic = len(driver.family) == 1
    if "expected" in p or deterministic:
        expected = p.get("expected", driver.family[0].oracle.get("tau"))
        t = p.get("tolerance", tol["ergodic"])
        gap = abs(g.terminal_rate - expected)
        rep.estimate("expected", expected, "maps", oracle="log spectral radius" if "expected" not in p else None)
        rep.check("rate_vs_expected", gap <= t, gap, t, src, oracle="log spectral radius")
    curves = [alpha]
    records = None
    if p.get("records", n <= MAX_RECORD_HORIZON):
        eps = p.get("eps", 0.1)
        basis = [tuple(b) for b in p.get("basis", ((1, 0), (0, 1), (1, 1)))]
        records = km_record_times(tr, eps)
        rep.estimate("K_eps", records.K_eps, "ergodic.km_record_times")
        rep.estimate("record_count", int(records.indices.size), "ergodic.km_record_times")
        rep.estimate("record_count_before_sandwich", records.unfiltered, "ergodic.km_record_times")
        rep.check("records_nonempty", records.indices.size > 0, int(records.indices.size), 1,
                  "ergodic.km_record_times")
        if records.indices.size:
            dc = dominant_curve(tr, basis, eps, records=records)
            rep.estimate("dominant_curve", list(dc.curve), "ergodic.dominant_curve")
            rep.estimate("top_record", dc.record_time, "ergodic.dominant_curve")
            rep.estimate("winner_histogram", dc.histogram, "ergodic.dominant_curve")
            rep.estimate("max_additive_gap", dc.max_gap, "ergodic.dominant_curve", oracle="a(n) - max over basis")
            rep.check("dominant_lower_bound", dc.lower_bound_ok, dc.lower_bound_margin, tol["algebraic"],
                      "ergodic.dominant_curve")
            rep.check("growth_cap", dc.growth_ok, dc.growth_excess, tol["algebraic"], "ergodic.dominant_curve")
            dg = curve_growth(tr, dc.curve)
            rep.estimate("dominant_rate", dg.terminal_rate, src)
            if not deterministic:
                t = p.get("tolerance", RANDOM_GROWTH_TOL)
                rep.check("dominant_rate_vs_tau_hat", dg.gap <= t, dg.gap, t, src, oracle="Thurston-metric drift")
            curves = list(dict.fromkeys([alpha, *basis]))
    header = ["k", "a_k", "a_k_over_k", "record"] + [f"log_length_{a}_{b}" for a, b in curves]
    rep.table("cocycle", header, _cocycle_rows(tr, records, curves))


def default_zoo(space, rng):
    """Maps exercised by the invariant suite on ``space``."""
    if isinstance(space, EuclideanSpace):
        zoo = [M.translation(space, np.arange(1, space.dim + 1) / space.dim), M.scaling(space, 0.5)]
        if space.dim >= 2 and space.p == 2.0:
            zoo.insert(1, M.rotation(space, 1.0))
        return zoo
    if isinstance(space, PoincareDisk):
        return [M.hyperbolic_mobius(space), M.parabolic_mobius(space), M.disk_rotation(space, 1.0),
                M.random_mobius(space, rng), M.disk_power(space, 2), *M.wolff_denjoy_family(space)[3:]]
    if isinstance(space, PositiveCone):
        k = space.dim
        A = np.full((k, k), 1.0 / k)
        B = 0.5 * np.eye(k) + 0.5 * np.roll(np.eye(k), 1, axis=1)
        return [M.cone_linear(space, A), M.cone_linear(space, B), M.cone_linear(space, 2.0 * np.eye(k))]
    if isinstance(space, OperatorSpace):
        # well-conditioned powers keep step distances resolvable along the orbit
        k = space.dim
        Q, _ = np.linalg.qr(rng.normal(size=(k, k)))
        shear = np.eye(k) + np.triu(np.ones((k, k)), 1)
        return [M.left_multiplication(space, 1.5 * Q), M.left_multiplication(space, shear),
                M.left_multiplication(space, np.diag(1.05 ** np.arange(k)))]
    if isinstance(space, TorusTeich):
        return [M.mapping_class(space, [[2, 1], [1, 1]]), M.mapping_class(space, [[1, 1], [0, 1]]),
                M.mapping_class(space, [[0, -1], [1, 0]])]
    raise ParameterError(f"no default maps for {space.name}")


def default_functionals(space, rng):
    pts = space.sample(rng, 2)
    out = [internal_functional(space, pts[0]), internal_functional(space, pts[1])]
    if isinstance(space, PoincareDisk):
        out += [disk_busemann(1.0, space), disk_busemann(cmath.exp(2j), space)]
    if isinstance(space, EuclideanSpace) and space.p == 2.0:
        e = np.zeros(space.dim)
        e[0] = 1.0
        out += [linear_dual(e), hilbert_functional(1.0, e), hilbert_functional(2.0, 0.5 * e),
                hilbert_functional(0.0, 0 * e)]
    return out


def exp_invariants(cfg, rep: Report):
    tol = cfg["tolerances"]
    space = build_space(cfg.get("space"))
    n = cfg["samples"]
    seed = cfg["seed"]
    rng = np.random.default_rng(seed)
    zoo = ([build_map(m, space) for m in cfg["params"]["maps"]] if "maps" in cfg["params"]
           else default_zoo(space, rng))
    rep.add_result(check_triangle(space, n, seed, tol["algebraic"]), "core.Space")
    rep.add_result(check_separation(space, min(n, 200), seed), "core.Space")
    convex = isinstance(space, EuclideanSpace)
    for h in default_functionals(space, rng):
        for r in check_functional(h, space, n, seed, tol["algebraic"], convex=convex and h.tag != "Internal"):
            rep.add_result(r, "core.MetricFunctional")
    horizon = min(cfg["horizon"], 200)
    for f in zoo:
        rep.add_result(check_semicontraction(f, n, seed, tol["algebraic"]), "spectral.Semicontraction")
        trace = orbit(f, n=horizon, tol=tol["algebraic"])
        rep.check(f"subadditivity[{f.label}]", True, trace.checks["subadditivity_excess"], tol["algebraic"],
                  "spectral.orbit")
        tau_hat = drift(trace).tau_hat
        # tau_hat <= d(x, f x) + 2 d(x0, x) / n for every x
        pts = space.sample(np.random.default_rng(seed), 100) + [trace.x0]
        with trace.space.context():
            bounds = [space.dist(x, f(x)) + 2 * max(space.dist(trace.x0, x), space.dist(x, trace.x0)) / horizon
                      for x in pts]
            disp = min(space.dist(x, f(x)) for x in pts)
        excess = tau_hat - min(bounds)
        rep.estimate(f"tau_hat[{f.label}]", tau_hat, "spectral.drift")
        rep.estimate(f"d_hat[{f.label}]", disp, "spectral.min_displacement")
        rep.check(f"tau_below_displacement[{f.label}]", excess <= tol["algebraic"], excess, tol["algebraic"],
                  "spectral.min_displacement")
    pairs = [(zoo[i], zoo[j]) for i in range(len(zoo)) for j in range(i + 1, len(zoo))
             if zoo[i].matrix is not None and zoo[j].matrix is not None and hasattr(space, "base_dists")]
    if not pairs and not isinstance(space, PoincareDisk):
        pairs = [(zoo[0], zoo[1])]
    for f, g in pairs[:3]:
        big = f.matrix is not None and hasattr(space, "base_dists")
        r = tracial_check(f, g, horizon=10000 if big else 2000)
        rep.check(f"tracial[{f.label},{g.label}]", r.difference < tol["ergodic"], r.difference, tol["ergodic"],
                  "spectral.tracial_check", oracle="tau(fg) = tau(gf)")


EXPERIMENT_FUNCS = {
    "drift": exp_drift,
    "functional": exp_functional,
    "wolff-denjoy": exp_wolff_denjoy,
    "mean-ergodic": exp_mean_ergodic,
    "lyapunov": exp_lyapunov,
    "thurston": exp_thurston,
    "curve-growth": exp_curve_growth,
    "invariants": exp_invariants,
}


def run_experiment(cfg: dict) -> Report:
    """Run ``cfg["experiment"]`` on a validated, defaults-filled config.

    Library errors raised during the run are recorded as a failed check
    named after the error class instead of propagating.
    """
    rep = Report(cfg["experiment"], cfg)
    try:
        EXPERIMENT_FUNCS[cfg["experiment"]](cfg, rep)
    except MetSpecError as exc:
        rep.check(type(exc).__name__, False, str(exc), None, cfg["experiment"])
    return rep


# catalog ----------------------------------------------------------------------------------

CATALOG = {
    "drift": {
        "topic": "drift and Fekete infimum of a single semicontraction",
        "example": {"schema_version": 1, "experiment": "drift",
                    "space": {"type": "euclidean", "dim": 2, "p": 2},
                    "map": {"type": "translation", "c": [3, 4]}, "horizon": 100},
    },
    "functional": {
        "topic": "record-time extraction of a descending metric functional",
        "example": {"schema_version": 1, "experiment": "functional",
                    "map": {"type": "mobius", "matrix": [[1, 0.5], [0.5, 1]]}, "horizon": 1000,
                    "params": {"k_check": 200}},
    },
    "wolff-denjoy": {
        "topic": "orbits of fixed-point-free holomorphic disk maps and their Busemann functions",
        "example": {"schema_version": 1, "experiment": "wolff-denjoy",
                    "map": {"type": "mobius", "matrix": [[1, 0.5], [0.5, 1]]}, "horizon": 1000},
    },
    "mean-ergodic": {
        "topic": "mean ergodic theorem for affine isometries via metric functionals",
        "example": {"schema_version": 1, "experiment": "mean-ergodic", "horizon": 10000,
                    "params": {"U": [[0.5403023058681398, -0.8414709848078965, 0],
                                     [0.8414709848078965, 0.5403023058681398, 0], [0, 0, 1]],
                               "v": [1, 0, 1]}},
    },
    "lyapunov": {
        "topic": "top Lyapunov exponent of random matrix products",
        "example": {"schema_version": 1, "experiment": "lyapunov", "horizon": 100000, "seed": 1,
                    "driver": {"kind": "iid", "family": [
                        {"type": "left-mult", "matrix": [[4, 0], [0, 1]]},
                        {"type": "left-mult", "matrix": [[1, 0], [0, 2]]}]},
                    "params": {"expected": 0.6931471805599453}},
    },
    "thurston": {
        "topic": "Thurston metric on the flat torus: curve enumeration against the closed form",
        "example": {"schema_version": 1, "experiment": "thurston", "seed": 0,
                    "params": {"pairs": 100, "N": 50}},
    },
    "curve-growth": {
        "topic": "curve-length growth under mapping-class cocycles on the torus (top exponent)",
        "example": {"schema_version": 1, "experiment": "curve-growth", "horizon": 60,
                    "driver": {"kind": "iid", "family": [{"type": "mapping-class", "matrix": [[2, 1], [1, 1]]}]},
                    "params": {"alpha": [1, 0]}},
    },
    "invariants": {
        "topic": "sampled property suite: triangle inequality, functionals, semicontraction, tracial drift",
        "example": {"schema_version": 1, "experiment": "invariants", "space": {"type": "poincare-disk"},
                    "samples": 1000, "seed": 7},
    },
}
