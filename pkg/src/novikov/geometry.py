"""Pseudo-spherical frames, metrics and curvature induced by solutions.

One-forms w_i = f_i1 dx + f_i2 dt with (s = sqrt(1 + mu^2), m = u - u_xx)

    psi = (4/m1) u u_x - 2 u_x^2 - 2 u^2
    f11 = m                     f12 = 2 u m + psi
    f21 = mu m + sigma m1 s     f22 = mu f12
    f31 = sigma s m + m1 mu     f32 = sigma s f12

and metric g = w1^2 + w2^2 = g11 dx^2 + 2 g12 dx dt + g22 dt^2.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .jets import FieldHistory, Jet3, diff_array, history_jets
from .solutions import Solution

M1_VALUES = (-2, 1)


@dataclass(frozen=True)
class PSSParams:
    m1: int = -2
    mu: float = 0.0
    sigma: int = 1

    def __post_init__(self):
        if self.m1 not in M1_VALUES:
            raise ValueError(f"m1 must be -2 or 1, got {self.m1!r}")
        if self.sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")
        if not math.isfinite(self.mu):
            raise ValueError("mu must be finite")

    @property
    def s(self) -> float:
        return math.sqrt(1.0 + self.mu**2)

    def label(self) -> str:
        return f"m1={self.m1},mu={self.mu:g},sigma={self.sigma:+d}"


def acceptance_params(mus=(0.0, 1.0)) -> list[PSSParams]:
    return [PSSParams(m1, mu, sg) for m1 in M1_VALUES for sg in (1, -1) for mu in mus]


@dataclass(frozen=True)
class FrameCoeffs:
    f11: np.ndarray
    f12: np.ndarray
    f21: np.ndarray
    f22: np.ndarray
    f31: np.ndarray
    f32: np.ndarray

    def as_tuple(self):
        return (self.f11, self.f12, self.f21, self.f22, self.f31, self.f32)


def _psi(j: Jet3, m1):
    return (4.0 / m1) * j.u * j.ux - 2 * j.ux**2 - 2 * j.u**2


def frame_coeffs(j: Jet3, p: PSSParams) -> FrameCoeffs:
    m = j.u - j.uxx
    f12 = 2 * j.u * m + _psi(j, p.m1)
    s = p.s
    return FrameCoeffs(
        f11=m, f12=f12,
        f21=p.mu * m + p.sigma * p.m1 * s, f22=p.mu * f12,
        f31=p.sigma * s * m + p.m1 * p.mu, f32=p.sigma * s * f12,
    )


def genericity(j: Jet3, p: PSSParams):
    """dx^dt coefficient of w1^w2."""
    f = frame_coeffs(j, p)
    return f.f11 * f.f22 - f.f12 * f.f21


def metric(j: Jet3, p: PSSParams):
    f = frame_coeffs(j, p)
    return (f.f11**2 + f.f21**2, f.f11 * f.f12 + f.f21 * f.f22, f.f12**2 + f.f22**2)


def metric_polynomial(j: Jet3, p: PSSParams):
    """The metric written directly as a polynomial in u and its derivatives."""
    m = j.u - j.uxx
    s = p.s
    A = 2 * j.u * m + _psi(j, p.m1)
    g11 = m**2 + (p.mu * m + p.sigma * p.m1 * s) ** 2
    g12 = A * ((1 + p.mu**2) * m + p.sigma * p.m1 * p.mu * s)
    g22 = (1 + p.mu**2) * A**2
    return g11, g12, g22


def _frame_derivatives(j: Jet3, p: PSSParams):
    """(D_t f_i1, D_x f_i2) for i = 1..3 by the chain rule on jet coordinates."""
    u, ux, uxx, uxxx = j.u, j.ux, j.uxx, j.uxxx
    m, mx = u - uxx, ux - uxxx
    psix = (4.0 / p.m1) * (ux**2 + u * uxx) - 4 * ux * uxx - 4 * u * ux
    dt_f11 = j.ut - j.utxx
    dx_f12 = 2 * ux * m + 2 * u * mx + psix
    s = p.s
    return ((dt_f11, dx_f12), (p.mu * dt_f11, p.mu * dx_f12),
            (p.sigma * s * dt_f11, p.sigma * s * dx_f12))


def _jets_of(source) -> Jet3:
    if isinstance(source, Jet3):
        return source
    if isinstance(source, FieldHistory):
        return history_jets(source)
    raise TypeError("expected a Jet3 or a FieldHistory")


def structure_residuals(source, p: PSSParams):
    """Residuals of d w1 = w3^w2, d w2 = w1^w3, d w3 = w1^w2 (dx^dt coefficients).

    ``source`` is a Jet3 (closed-form or precomputed) or a FieldHistory, whose
    jets are finite-differenced.
    """
    j = _jets_of(source)
    f = frame_coeffs(j, p)
    (t11, x12), (t21, x22), (t31, x32) = _frame_derivatives(j, p)
    r1 = (x12 - t11) - (f.f31 * f.f22 - f.f32 * f.f21)
    r2 = (x22 - t21) - (f.f11 * f.f32 - f.f12 * f.f31)
    r3 = (x32 - t31) - (f.f11 * f.f22 - f.f12 * f.f21)
    return r1, r2, r3


def _half_matrix(a, b, c):
    # 1/2 [[a, b - c], [b + c, -a]] as a (..., 2, 2) stack
    out = np.empty(np.shape(a) + (2, 2))
    out[..., 0, 0] = a
    out[..., 0, 1] = b - c
    out[..., 1, 0] = b + c
    out[..., 1, 1] = -a
    return 0.5 * out


def zero_curvature_residual(source, p: PSSParams):
    """Frobenius norm of d_t X - d_x T + XT - TX at every point."""
    j = _jets_of(source)
    f = frame_coeffs(j, p)
    (t11, x12), (t21, x22), (t31, x32) = _frame_derivatives(j, p)
    u = np.asarray(j.u, dtype=float)
    bc = lambda v: np.broadcast_to(v, u.shape)  # noqa: E731
    X = _half_matrix(bc(f.f21), bc(f.f11), bc(f.f31))
    T = _half_matrix(bc(f.f22), bc(f.f12), bc(f.f32))
    Xt = _half_matrix(bc(t21), bc(t11), bc(t31))
    Tx = _half_matrix(bc(x22), bc(x12), bc(x32))
    Z = Xt - Tx + X @ T - T @ X
    return np.sqrt(np.sum(Z**2, axis=(-2, -1)))


# ---------------------------------------------------------------------------
# sampled metrics and curvature


@dataclass
class MetricField:
    t: np.ndarray            # (nt,) uniform
    x: np.ndarray            # (nx,) uniform
    g11: np.ndarray          # (nt, nx)
    g12: np.ndarray
    g22: np.ndarray
    w: np.ndarray            # genericity, same shape

    @property
    def det(self):
        return self.g11 * self.g22 - self.g12**2

    def to_csv(self, path):
        T, X = np.meshgrid(self.t, self.x, indexing="ij")
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t", "x", "g11", "g12", "g22", "w"])
            for row in zip(*(a.ravel() for a in (T, X, self.g11, self.g12, self.g22, self.w))):
                wr.writerow([repr(float(v)) for v in row])


def metric_from_jets(j: Jet3, p: PSSParams, t, x) -> MetricField:
    g11, g12, g22 = metric(j, p)
    shape = (len(t), len(x))
    b = lambda v: np.broadcast_to(np.asarray(v, dtype=float), shape).copy()  # noqa: E731
    return MetricField(np.asarray(t, float), np.asarray(x, float), b(g11), b(g12), b(g22),
                       b(genericity(j, p)))


def metric_from_solution(sol: Solution, p: PSSParams, t, x) -> MetricField:
    T, X = np.meshgrid(t, x, indexing="ij")
    return metric_from_jets(sol.jet(T, X), p, t, x)


def metric_from_history(h: FieldHistory, p: PSSParams, indices) -> MetricField:
    """Metric on selected snapshots (uniformly spaced indices) of a solver run."""
    indices = np.asarray(indices)
    j = history_jets(h, indices)
    return metric_from_jets(j, p, h.times[indices], h.grid.x)


@dataclass
class CurvatureField:
    t: np.ndarray
    x: np.ndarray
    K: np.ndarray
    mask: np.ndarray

    def values(self):
        return self.K[self.mask]

    def max_deviation(self, target: float = -1.0) -> float:
        return float(np.max(np.abs(self.values() - target)))

    def to_csv(self, path):
        T, X = np.meshgrid(self.t, self.x, indexing="ij")
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t", "x", "K"])
            for t, x, k in zip(T[self.mask], X[self.mask], self.K[self.mask]):
                wr.writerow([repr(float(t)), repr(float(x)), repr(float(k))])


def _step(v) -> float:
    d = np.diff(v)
    if d.size == 0 or not np.allclose(d, d[0], rtol=1e-9, atol=0):
        raise ValueError("curvature needs a uniform grid in both t and x")
    return float(d[0])


def brioschi(E, F, G, Ex, Et, Fx, Ft, Gx, Gt, Ett, Fxt, Gxx):
    """Gaussian curvature from the metric E dx^2 + 2F dx dt + G dt^2 (x first, t second)."""
    a11 = -0.5 * Ett + Fxt - 0.5 * Gxx
    a12, a13 = 0.5 * Ex, Fx - 0.5 * Et
    a21, a31 = Ft - 0.5 * Gx, 0.5 * Gt
    detA = (a11 * (E * G - F * F) - a12 * (a21 * G - F * a31) + a13 * (a21 * F - E * a31))
    b12, b13 = 0.5 * Et, 0.5 * Gx
    detB = -b12 * (b12 * G - F * b13) + b13 * (b12 * F - E * b13)
    return (detA - detB) / (E * G - F * F) ** 2


def gauss_curvature(mf: MetricField, w_min: float | None = None, rel_tol: float = 1e-8,
                    margin: int = 3) -> CurvatureField:
    """Brioschi curvature with 4th-order differences on the (t, x) grid.

    Points are kept when |w| exceeds ``w_min`` (if given) or ``rel_tol`` times
    the local frame magnitude sqrt(g11 g22), and lie ``margin`` nodes inside.
    """
    dt, dx = _step(mf.t), _step(mf.x)
    E, F, G = mf.g11, mf.g12, mf.g22
    d = lambda a, k, ax: diff_array(a, dt if ax == 0 else dx, k, axis=ax)  # noqa: E731
    Ex, Et = d(E, 1, 1), d(E, 1, 0)
    Fx, Ft = d(F, 1, 1), d(F, 1, 0)
    Gx, Gt = d(G, 1, 1), d(G, 1, 0)
    Ett, Gxx = d(E, 2, 0), d(G, 2, 1)
    Fxt = d(Fx, 1, 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        K = brioschi(E, F, G, Ex, Et, Fx, Ft, Gx, Gt, Ett, Fxt, Gxx)
    scale = np.sqrt(np.abs(E * G))
    mask = np.abs(mf.w) > (w_min if w_min is not None else rel_tol * np.maximum(scale, 1e-300))
    edge = np.zeros_like(mask)
    edge[margin:E.shape[0] - margin, margin:E.shape[1] - margin] = True
    mask &= edge & np.isfinite(K)
    if not mask.any():
        raise ValueError("no generic interior points to evaluate curvature on")
    return CurvatureField(mf.t, mf.x, K, mask)


# ---------------------------------------------------------------------------
# non-generic classification


def expected_nongeneric(sol: Solution) -> set[int]:
    """m1 values for which the solution is listed as non-generic.

    SqrtDecay-type (u^2 = a e^{-x} + b) is non-generic for m1 = -2; SqrtGrow-type
    and f(t)e^x for m1 = 1.  Constants belong to both families.
    """
    kind = sol.kind
    if kind == "Constant":
        return {-2, 1}
    if kind in ("SqrtDecay", "ExpHalfNeg"):
        return {-2}
    if kind in ("SqrtGrow", "ExpX", "ExpOverPower", "TravellingExp", "TimesExpX"):
        return {1}
    return set()


@dataclass
class AuditResult:
    solution: dict
    sup_w: dict            # m1 -> sup |w|
    nongeneric: dict       # m1 -> bool
    expected: dict
    tol: float

    @property
    def consistent(self) -> bool:
        return self.nongeneric == self.expected

    def as_dict(self) -> dict:
        return {"solution": self.solution, "tol": self.tol, "consistent": self.consistent,
                "by_m1": {str(m1): {"sup_w": self.sup_w[m1], "non_generic": self.nongeneric[m1],
                                    "expected_non_generic": self.expected[m1]}
                          for m1 in M1_VALUES}}


def nongeneric_audit(sol: Solution, mu: float = 0.0, sigma: int = 1, tol: float = 1e-10,
                     n_x: int = 101, n_t: int = 5) -> AuditResult:
    from .solutions import sample_grid
    T, X = sample_grid(sol, n_x, n_t)
    j = sol.jet(T, X)
    exp = expected_nongeneric(sol)
    sup_w, flag, expected = {}, {}, {}
    for m1 in M1_VALUES:
        w = genericity(j, PSSParams(m1, mu, sigma))
        sup_w[m1] = float(np.max(np.abs(w)))
        flag[m1] = sup_w[m1] < tol
        expected[m1] = m1 in exp
    return AuditResult(sol.to_dict(), sup_w, flag, expected, tol)


def audit_json(results) -> str:
    return json.dumps([r.as_dict() for r in results], indent=2, sort_keys=True)
