"""The twelve acceptance checks, each returning a CriterionResult.

The reference run (u0 = g * (0.5 exp(-x^2)), L = 15, N = 2048, dt = 1e-3,
t in [0, 1]) is computed once per process and shared.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import characteristics as chars
from . import conservation as cons
from . import continuation as cont
from . import geometry as geo
from . import solutions as sol
from . import symmetry as sym
from .jets import DecayWarning, FieldHistory, Jet3, SpaceGrid, eq_residual, interior_mask
from .kernels import gaussian_smoothed
from .solver import CauchyProblem, SolverConfig, reference_config, run

REFERENCE_AMPLITUDE = 0.5


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    elapsed: float = 0.0
    budget: float | None = None

    @property
    def within_budget(self) -> bool:
        return self.budget is None or self.elapsed <= self.budget

    @property
    def ok(self) -> bool:
        return self.passed and self.within_budget

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        budget = f"/{self.budget:g}s" if self.budget is not None else ""
        return f"[{status}] criterion {self.number:2d}: {self.title} ({self.elapsed:.2f}s{budget})"

    def as_dict(self) -> dict:
        return {"criterion": self.number, "title": self.title, "pass": self.ok,
                "checks_pass": self.passed, "elapsed_s": self.elapsed, "budget_s": self.budget,
                "metrics": _plain(self.metrics)}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@lru_cache(maxsize=1)
def reference_history() -> FieldHistory:
    with warnings.catch_warnings():
        # the smoothed Gaussian is ~1.7e-7 at x = +-15; see the decay report
        warnings.simplefilter("ignore", DecayWarning)
        return run(CauchyProblem.gaussian(REFERENCE_AMPLITUDE), reference_config())


def _timed(number, title, budget):
    def wrap(fn):
        def inner(**kw):
            t0 = time.perf_counter()
            passed, metrics = fn(**kw)
            return CriterionResult(number, title, bool(passed), metrics,
                                   time.perf_counter() - t0, budget)
        inner.__name__ = fn.__name__
        inner.__doc__ = fn.__doc__
        return inner
    return wrap


# ---------------------------------------------------------------------------


@_timed(1, "exact-solution residuals < 1e-10", 5.0)
def criterion_1(tol=1e-10):
    reports = [sol.verify_residual(s, tol=tol) for s in sol.default_catalog()]
    kinds = sorted({s.kind for s in sol.default_catalog()})
    worst = max(r.max_abs_residual for r in reports)
    return all(r.passed for r in reports), {
        "families": kinds, "members": len(reports), "max_abs_residual": worst,
        "per_member": [r.as_dict() for r in reports]}


EXPECTED_COMMUTATORS = [[(0, 0, 0), (0, 0, 0), (0, 0, 0)],
                        [(0, 0, 0), (0, 0, 0), (0, 1, 0)],
                        [(0, 0, 0), (0, -1, 0), (0, 0, 0)]]
EXPECTED_ADJOINT = [["X1", "X2", "X3"],
                    ["X1", "X2", "X3 - eps X2"],
                    ["X1", "e^eps X2", "X3"]]


@_timed(2, "commutator and adjoint tables", 1.0)
def criterion_2():
    comm = [[v.coords for v in row] for row in sym.commutator_table()]
    integer = all(float(c).is_integer() for row in comm for v in row for c in v)
    comm_ok = [[tuple(int(c) for c in v) for v in row] for row in comm] == EXPECTED_COMMUTATORS
    adj = sym.adjoint_table()
    eps = 0.37
    spot = sym.adjoint(3, eps, sym.X2)
    spot_ok = spot.coords == (0.0, math.exp(eps), 0.0)
    return integer and comm_ok and adj == EXPECTED_ADJOINT and spot_ok, {
        "commutators": comm, "adjoint": adj, "integer_structure_constants": integer}


def random_jets(n: int, rng: np.random.Generator, scale: float = 1.0) -> Jet3:
    t, x = rng.uniform(-2, 2, (2, n))
    vals = rng.uniform(-scale, scale, (7, n))
    return Jet3(t, x, *vals)


@_timed(3, "current divergence = multiplier x residual", 1.0)
def criterion_3(seed=0, n=1000, tol=1e-10):
    rng = np.random.default_rng(seed)
    j = random_jets(n, rng)
    res = eq_residual(j)
    rate = rng.uniform(-1, 1)
    out = {}
    for cp in (cons.CurrentPair("current1"), cons.CurrentPair("current2"),
               cons.CurrentPair("current3", label="f=1"), cons.CurrentPair.exp_weighted(rate)):
        err = np.abs(cons.total_divergence(cp, j) - cons.multiplier(cp, j.t, j.x) * res)
        out[cp.name] = float(err.max())
    return all(v < tol for v in out.values()), {"max_abs_defect": out, "jets": n}


@_timed(4, "conserved-quantity drift < 1e-3 on the reference run", 120.0)
def criterion_4(tol=1e-3):
    h = reference_history()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DecayWarning)
        reps = [cons.drift_monitor(cp, h) for cp in cons.standard_currents()]
    drift = {r.id: r.relative_drift for r in reps}
    return all(v < tol for v in drift.values()), {
        "relative_drift": drift, "summaries": [r.summary() for r in reps]}


def reference_seeds(n: int = 97, reach: float = 12.0):
    return np.linspace(-reach, reach, n)


@_timed(5, "positivity along characteristics", 120.0)
def criterion_5():
    h = reference_history()
    cm = chars.evolve_characteristics(h, reference_seeds())
    rep = chars.sign_preservation_report(h, cm)
    return rep.passed(1e-6, 1e-5), rep.as_dict()


PROBE_WINDOWS = ((-1.0, 1.0), (-3.0, -2.0), (0.5, 2.5))


@_timed(6, "window kernel signs and representation identity", 10.0)
def criterion_6(seed=0, n=10_000):
    rng = np.random.default_rng(seed)
    sign_ok = True
    worst_sign = 0.0
    for _ in range(5):
        a = rng.uniform(-5, 5)
        b = a + rng.uniform(0.1, 5)
        S = cont.WindowKernel(cont.ProbeInterval(a, b))
        left = rng.uniform(a - 20, a, n)
        right = rng.uniform(b, b + 20, n)
        right = right[right > b]
        exact = np.exp(a - right) * (np.exp(b - a) - 1)
        sign_ok &= bool(np.all(S(left) == 0.0) and np.all(S(right) > 0))
        worst_sign = max(worst_sign, float(np.max(np.abs(S(right) - exact))))
    sign_ok &= worst_sign < 1e-12
    grid = SpaceGrid(15.0, 2048)
    from .jets import Field
    h = FieldHistory.single(Field(grid, 0.0, gaussian_smoothed(grid.x, 1.0)))
    reps = {f"({a:g},{b:g})": cont.representation_check(h, 0, cont.ProbeInterval(a, b)).relative
            for a, b in PROBE_WINDOWS}
    return sign_ok and all(v < 1e-6 for v in reps.values()), {
        "max_right_branch_error": worst_sign, "relative_residual": reps}


def _closed_form_generic(m1):
    """Catalog members whose frame is generic for this m1."""
    return [s for s in sol.default_catalog() if m1 not in geo.expected_nongeneric(s)]


def geometry_indices(h: FieldHistory, every: int = 10):
    return np.arange(0, len(h), every)


@_timed(7, "structure equations", 60.0)
def criterion_7(closed_tol=1e-10, numeric_tol=1e-3):
    h = reference_history()
    idx = geometry_indices(h)
    from .jets import history_jets
    jets = history_jets(h, idx)
    inner = interior_mask(h.grid.n)
    closed, numeric = {}, {}
    for p in geo.acceptance_params():
        worst = 0.0
        for s in _closed_form_generic(p.m1):
            T, X = sol.sample_grid(s)
            worst = max(worst, max(float(np.abs(r).max()) for r in geo.structure_residuals(s.jet(T, X), p)))
        closed[p.label()] = worst
        numeric[p.label()] = max(float(np.abs(r[:, inner]).max()) for r in geo.structure_residuals(jets, p))
    ok = all(v < closed_tol for v in closed.values()) and all(v < numeric_tol for v in numeric.values())
    return ok, {"closed_form_max": closed, "reference_run_interior_max": numeric}


@_timed(8, "Brioschi curvature", 60.0)
def criterion_8(n=201, w_min=0.1):
    p = geo.PSSParams(-2, 1.0, 1)
    t = np.linspace(0.5, 2.0, n)
    x = np.linspace(-1.0, 1.0, n)
    closed = geo.gauss_curvature(geo.metric_from_solution(sol.ExpOverPower(1.0, 0.0), p, t, x))
    h = reference_history()
    idx = geometry_indices(h)
    numeric = {}
    masked = {}
    for q in geo.acceptance_params():
        cf = geo.gauss_curvature(geo.metric_from_history(h, q, idx), w_min=w_min)
        numeric[q.label()] = cf.max_deviation()
        masked[q.label()] = int(cf.mask.sum())
    ok = closed.max_deviation() < 1e-3 and all(v < 1e-2 for v in numeric.values())
    return ok, {"closed_form_max_abs_K_plus_1": closed.max_deviation(),
                "reference_run_max_abs_K_plus_1": numeric, "masked_points": masked,
                "w_min": w_min}


def metric_exp_over_t(t, x, mu, sigma):
    s = math.sqrt(1 + mu**2)
    e = np.exp(2 * x) / t**2
    return 4 * (1 + mu**2) + 0 * e, sigma * 12 * mu * s * e, 36 * (1 + mu**2) * e**2


def metric_exp_half_neg(x, a, mu, sigma):
    s = math.sqrt(1 + mu**2)
    h = np.exp(-x / 2)
    g11 = (9 / 16 * a**2 * h**2 + 1) * (1 + mu**2) + sigma * 1.5 * a * mu * s * h
    g12 = -0.5 * (4.5 * a**3 * (1 + mu**2) * h**3 + sigma * 6 * a**2 * mu * s * h**2)
    g22 = 9 * a**4 * (1 + mu**2) * h**4
    return g11, g12, g22


def _metric_rel(got, want):
    scale = np.maximum.reduce([np.abs(w) for w in want])
    return max(float(np.max(np.abs(g - w) / scale)) for g, w in zip(got, want))


@_timed(9, "explicit metrics of e^x/t and a e^{-x/2}", None)
def criterion_9(seed=0, n=100, tol=1e-12):
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.5, 2.0, n)
    x = rng.uniform(-1.0, 1.0, n)
    worst = {"e^x/t, m1=-2": 0.0, "a e^{-x/2}, m1=1": 0.0}
    for sigma in (1, -1):
        for mu in (0.0, 1.0, float(rng.uniform(-3, 3))):
            j = sol.ExpOverPower(1.0, 0.0).jet(t, x)
            got = geo.metric(j, geo.PSSParams(-2, mu, sigma))
            worst["e^x/t, m1=-2"] = max(worst["e^x/t, m1=-2"], _metric_rel(got, metric_exp_over_t(t, x, mu, sigma)))
            for a in (1.0, -0.7, 2.5):
                j = sol.ExpHalfNeg(a).jet(t, x)
                got = geo.metric(j, geo.PSSParams(1, mu, sigma))
                worst["a e^{-x/2}, m1=1"] = max(worst["a e^{-x/2}, m1=1"],
                                                _metric_rel(got, metric_exp_half_neg(x, a, mu, sigma)))
    return all(v < tol for v in worst.values()), {"max_relative_error": worst, "points": n}


@_timed(10, "genericity audit", None)
def criterion_10(tol=1e-10):
    audits = [geo.nongeneric_audit(s, tol=tol) for s in sol.default_catalog()]
    te = sol.TravellingExp(1.0, 2.0)
    T, X = sol.sample_grid(te)
    j = te.jet(T, X)
    w_err = 0.0
    for mu in (0.0, 1.0, -2.0):
        for sigma in (1, -1):
            p = geo.PSSParams(-2, mu, sigma)
            w = geo.genericity(j, p)
            w_err = max(w_err, float(np.max(np.abs(w - (-sigma) * 12 * j.u**2 * p.s))))
    te_ok = next(a for a in audits if a.solution["kind"] == "TravellingExp").consistent
    return all(a.consistent for a in audits) and te_ok and w_err < tol, {
        "audits": [a.as_dict() for a in audits], "travelling_exp_w_error": w_err}


def _order(e1, e2):
    return math.log2(e1 / e2)


def self_convergence_dt(dts=(0.005, 0.0025, 0.00125), n=2048, t_end=1.0):
    grid = SpaceGrid(15.0, n)
    finals = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DecayWarning)
        for dt in dts:
            h = run(CauchyProblem.gaussian(REFERENCE_AMPLITUDE),
                    SolverConfig(grid, dt, t_end, snapshot_stride=10**9))
            finals.append(h.values[-1])
    e1 = float(np.max(np.abs(finals[0] - finals[1])))
    e2 = float(np.max(np.abs(finals[1] - finals[2])))
    return _order(e1, e2), (e1, e2)


def self_convergence_dx(ns=(513, 1025, 2049), dt=1e-3, t_end=1.0):
    finals = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DecayWarning)
        for n in ns:
            h = run(CauchyProblem.gaussian(REFERENCE_AMPLITUDE),
                    SolverConfig(SpaceGrid(15.0, n), dt, t_end, snapshot_stride=10**9))
            finals.append(h.values[-1])
    coarse = ns[0]
    # nested grids: every (n_k - 1)/(n_0 - 1)-th node coincides with the coarse grid
    on_coarse = [f[:: (len(f) - 1) // (coarse - 1)] for f in finals]
    e1 = float(np.max(np.abs(on_coarse[0] - on_coarse[1])))
    e2 = float(np.max(np.abs(on_coarse[1] - on_coarse[2])))
    return _order(e1, e2), (e1, e2)


def cross_formulation(t_end=0.5, n=2048, dt=1e-3):
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DecayWarning)
        for form in ("nonlocal_u", "m_transport"):
            h = run(CauchyProblem.gaussian(REFERENCE_AMPLITUDE),
                    SolverConfig(SpaceGrid(15.0, n), dt, t_end, form, snapshot_stride=10**9))
            out.append(h.values[-1])
    return float(np.max(np.abs(out[0] - out[1])))


@_timed(11, "solver self-convergence and cross-formulation", None)
def criterion_11():
    p_dt, e_dt = self_convergence_dt()
    p_dx, e_dx = self_convergence_dx()
    cross = cross_formulation()
    return p_dt >= 3.5 and p_dx >= 3.5 and cross < 1e-3, {
        "order_dt": p_dt, "diffs_dt": e_dt, "order_dx": p_dx, "diffs_dx": e_dx,
        "cross_formulation_sup_diff_t0.5": cross}


@_timed(12, "metric degeneration on the outer 10% of nodes", None)
def criterion_12(tol=1e-6):
    h = reference_history()
    idx = geometry_indices(h)
    from .jets import history_jets
    j = history_jets(h, idx)
    outer = np.abs(h.grid.x) >= 0.9 * h.grid.half_length
    worst = {}
    for p in geo.acceptance_params():
        g11, g12, g22 = geo.metric(j, p)
        worst[p.label()] = {
            "g11_minus_limit": float(np.max(np.abs(g11[:, outer] - p.m1**2 * (1 + p.mu**2)))),
            "g12": float(np.max(np.abs(g12[:, outer]))),
            "g22": float(np.max(np.abs(g22[:, outer])))}
    ok = all(v < tol for d in worst.values() for v in d.values())
    return ok, {"max_abs": worst, "outer_nodes": int(outer.sum())}


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 13)}


def run_criterion(k: int) -> CriterionResult:
    if k not in CRITERIA:
        raise KeyError(f"no criterion {k}")
    return CRITERIA[k]()


def run_all():
    return [run_criterion(k) for k in CRITERIA]
