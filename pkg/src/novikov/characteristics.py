"""Characteristic flow q_t = -2 u(t, q), q(0, x) = x, and sign propagation of m.

Along a characteristic d/dt m(t, q) = -2(u - 3u_x) m + 2(u - u_x)^2, hence

    m(t, q(t, x)) >= m0(x) exp(-2 int_0^t (u - 3u_x)(s, q(s, x)) ds).

All time integrals start at t = 0.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .jets import FieldHistory, diff_array
from .kernels import helmholtz_apply_array


class CharacteristicExit(RuntimeError):
    pass


def _lagrange4(row, x0: float, dx: float, q):
    """Cubic Lagrange interpolation of one sampled row at positions q."""
    n = row.shape[-1]
    s = (np.asarray(q) - x0) / dx
    i = np.clip(np.floor(s).astype(int) - 1, 0, n - 4)
    r = s - i                              # position relative to node i, in [1, 2) inside
    w0 = -(r - 1) * (r - 2) * (r - 3) / 6
    w1 = r * (r - 2) * (r - 3) / 2
    w2 = -r * (r - 1) * (r - 3) / 2
    w3 = r * (r - 1) * (r - 2) / 6
    return w0 * row[i] + w1 * row[i + 1] + w2 * row[i + 2] + w3 * row[i + 3]


class _Sampler:
    """u and u_x at (t, q): cubic in x, linear in t between snapshots."""

    def __init__(self, h: FieldHistory):
        self.h = h
        self.U = h.values
        self.UX = diff_array(h.values, h.grid.dx, 1, axis=1)
        self.x0 = float(h.grid.x[0])
        self.dx = h.grid.dx

    def _at(self, arr, t, q):
        times = self.h.times
        k = int(np.clip(np.searchsorted(times, t, side="right") - 1, 0, len(times) - 2))
        th = (t - times[k]) / (times[k + 1] - times[k])
        a = _lagrange4(arr[k], self.x0, self.dx, q)
        if th == 0.0:
            return a
        b = _lagrange4(arr[k + 1], self.x0, self.dx, q)
        return (1 - th) * a + th * b

    def u(self, t, q):
        return self._at(self.U, t, q)

    def ux(self, t, q):
        return self._at(self.UX, t, q)


@dataclass
class CharMap:
    times: np.ndarray        # (nt,)
    seeds: np.ndarray        # (ns,)
    q: np.ndarray            # (nt, ns)
    qx: np.ndarray           # (nt, ns), variational ODE
    u_along: np.ndarray      # u(t, q)
    ux_along: np.ndarray     # u_x(t, q)
    m_along: np.ndarray      # m(t, q)

    def qx_exp_formula(self):
        """exp(-2 int_0^t u_x(s, q) ds) by the trapezoid rule on the stored samples."""
        return np.exp(-2 * _cumtrapz(self.ux_along, self.times))

    def monotone(self) -> bool:
        order = np.argsort(self.seeds)
        return bool(np.all(np.diff(self.q[:, order], axis=1) > 0))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x_seed", "q", "qx", "m_along"])
            for i, t in enumerate(self.times):
                for j, x in enumerate(self.seeds):
                    w.writerow([repr(float(t)), repr(float(x)), repr(float(self.q[i, j])),
                                repr(float(self.qx[i, j])), repr(float(self.m_along[i, j]))])


def _cumtrapz(y, t):
    out = np.zeros_like(y)
    dt = np.diff(t)[:, None]
    out[1:] = np.cumsum(0.5 * dt * (y[1:] + y[:-1]), axis=0)
    return out


def evolve_characteristics(h: FieldHistory, seeds, max_dt: float = 1e-2,
                           margin: int = 2) -> CharMap:
    """RK4 over the snapshot times for (q, q_x) from every seed."""
    if len(h) < 2:
        raise ValueError("need at least two snapshots")
    steps = np.diff(h.times)
    if steps.max() > max_dt * (1 + 1e-9):
        raise ValueError(f"snapshots too sparse (dt={steps.max():g} > {max_dt:g})")
    seeds = np.asarray(seeds, dtype=float)
    grid = h.grid
    lo = grid.x[0] + margin * grid.dx
    hi = grid.x[-1] - margin * grid.dx
    if np.any(seeds < lo) or np.any(seeds > hi):
        raise CharacteristicExit("seed outside the truncated domain")
    S = _Sampler(h)

    def f(t, y):
        q, qx = y
        return np.array([-2 * S.u(t, q), -2 * S.ux(t, q) * qx])

    nt = len(h)
    Q = np.empty((nt, seeds.size))
    QX = np.empty_like(Q)
    y = np.array([seeds, np.ones_like(seeds)])
    Q[0], QX[0] = y
    for k in range(nt - 1):
        t, dt = h.times[k], steps[k]
        k1 = f(t, y)
        k2 = f(t + dt / 2, y + dt / 2 * k1)
        k3 = f(t + dt / 2, y + dt / 2 * k2)
        k4 = f(t + dt, y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if np.any(y[0] < lo) or np.any(y[0] > hi):
            raise CharacteristicExit(f"characteristic left the domain at t={t + dt:g}")
        Q[k + 1], QX[k + 1] = y

    M = helmholtz_apply_array(h.values, grid.dx)
    x0, dx = float(grid.x[0]), grid.dx
    U = np.array([_lagrange4(h.values[k], x0, dx, Q[k]) for k in range(nt)])
    UX = np.array([_lagrange4(S.UX[k], x0, dx, Q[k]) for k in range(nt)])
    MA = np.array([_lagrange4(M[k], x0, dx, Q[k]) for k in range(nt)])
    return CharMap(h.times.copy(), seeds, Q, QX, U, UX, MA)


@dataclass
class SignReport:
    min_m_along: float
    min_u: float
    min_qx: float
    min_bound_margin: float       # min over samples of m(t,q) - bound
    max_qx_formula_error: float
    monotone: bool

    def passed(self, m_tol=1e-6, bound_tol=1e-5) -> bool:
        return (self.min_m_along >= -m_tol and self.min_qx > 0
                and self.min_bound_margin >= -bound_tol and self.monotone)

    def as_dict(self) -> dict:
        d = {k: (float(v) if not isinstance(v, bool) else v) for k, v in self.__dict__.items()}
        d["pass"] = self.passed()
        return d

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, indent=2, sort_keys=True)


def lower_bound(cm: CharMap):
    """m0(x) exp(-2 int_0^t (u - 3u_x)(s, q) ds) for every stored (t, seed)."""
    integral = _cumtrapz(cm.u_along - 3 * cm.ux_along, cm.times)
    return cm.m_along[0][None, :] * np.exp(-2 * integral)


def sign_preservation_report(h: FieldHistory, cm: CharMap) -> SignReport:
    margin = cm.m_along - lower_bound(cm)
    return SignReport(
        min_m_along=float(cm.m_along.min()),
        min_u=float(h.values.min()),
        min_qx=float(cm.qx.min()),
        min_bound_margin=float(margin.min()),
        max_qx_formula_error=float(np.max(np.abs(cm.qx - cm.qx_exp_formula()))),
        monotone=cm.monotone(),
    )
