"""Unique-continuation probes built on F = G * u^2 and the window kernel

    S_{a,b}(y) = G(b - y) - G(a - y)
               = 0                    y < a
               = -e^{a-y}             a < y < b
               = e^{b-y} - e^{a-y}    y > b

so that F(b) - F(a) = int S_{a,b} u^2 dy.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .jets import Field, FieldHistory, diff_array, diff_t
from .kernels import G_kernel, convolve_array

EPS0 = 1e-8
VERDICTS = ("forced-zero", "nonzero-mass", "inapplicable")


@dataclass(frozen=True)
class ProbeInterval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError(f"need finite a < b, got ({self.a}, {self.b})")


@dataclass(frozen=True)
class WindowKernel:
    iv: ProbeInterval

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return G_kernel(self.iv.b - y) - G_kernel(self.iv.a - y)

    def closed_form(self, y):
        """Branchwise formula (y = a, b take the G(0) = 1/2 convention)."""
        a, b = self.iv.a, self.iv.b
        y = np.asarray(y, dtype=float)
        out = np.where(y < a, 0.0, np.where(y < b, -np.exp(a - y), np.exp(b - y) - np.exp(a - y)))
        out = np.where(y == a, -0.5, out)
        return np.where(y == b, 0.5 - np.exp(a - b), out)

    @property
    def l1_norm(self) -> float:
        return 2.0 * (1.0 - math.exp(self.iv.a - self.iv.b))

    def l1_quadrature(self, half_length: float, n: int = 20001) -> float:
        pieces = _pieces(self.iv, -half_length, half_length, n)
        return float(_gauss_pieces(pieces, lambda y: np.abs(self(y))))


def _pieces(iv: ProbeInterval, lo: float, hi: float, n: int):
    nodes = np.linspace(lo, hi, n)
    cuts = [c for c in (iv.a, iv.b) if lo < c < hi]
    return np.unique(np.concatenate([nodes, cuts]))


_GL_S, _GL_W = np.polynomial.legendre.leggauss(4)


def _gauss_pieces(breaks, fn):
    """Composite 4-point Gauss-Legendre over consecutive breakpoints."""
    a, b = breaks[:-1], breaks[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    y = mid[:, None] + half[:, None] * _GL_S[None, :]
    return np.sum(half[:, None] * _GL_W[None, :] * fn(y))


# ---------------------------------------------------------------------------


def F_array(values, grid):
    return convolve_array("G", np.asarray(values) ** 2, grid)


def F_of(h: FieldHistory, k: int) -> Field:
    """F = G * u^2 at snapshot k."""
    snap = h.snapshot(k)
    return Field(h.grid, snap.t, F_array(snap.values, h.grid))


def F_identity(h: FieldHistory, k: int) -> Field:
    """u_t + u^2 - 2 u u_x with u_t differenced from the history."""
    snap = h.snapshot(k)
    u = snap.values
    ut = diff_t(h, k).values
    return Field(h.grid, snap.t, ut + u**2 - 2 * u * diff_array(u, h.grid.dx, 1))


def _check_inside(iv: ProbeInterval, grid):
    if iv.a <= grid.x[0] or iv.b >= grid.x[-1]:
        raise ValueError(f"interval ({iv.a}, {iv.b}) not inside the grid")


@dataclass
class Representation:
    F_a: float
    F_b: float
    integral: float
    residual: float
    relative: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def representation_check(h: FieldHistory, k: int, iv: ProbeInterval,
                         n_pieces: int | None = None) -> Representation:
    """Compare F(b) - F(a) with int S_{a,b} u^2.

    F comes from the grid convolution, interpolated to a and b by a cubic
    spline; the right side is a composite Gauss rule on the spline of u,
    split at a and b where S has kinks and jumps.  The relative residual is
    scaled by max(|F(a)|, |F(b)|, int |S| u^2).
    """
    grid = h.grid
    _check_inside(iv, grid)
    u = h.values[k]
    x = grid.x
    Fs = CubicSpline(x, F_array(u, grid))
    F_a, F_b = float(Fs(iv.a)), float(Fs(iv.b))
    us = CubicSpline(x, u)
    S = WindowKernel(iv)
    breaks = _pieces(iv, iv.a, x[-1], n_pieces or grid.n)
    integral = float(_gauss_pieces(breaks, lambda y: S(y) * us(y) ** 2))
    abs_int = float(_gauss_pieces(breaks, lambda y: np.abs(S(y)) * us(y) ** 2))
    residual = abs(F_b - F_a - integral)
    scale = max(abs(F_a), abs(F_b), abs_int)
    return Representation(F_a, F_b, integral, residual, residual / scale if scale > 0 else 0.0)


@dataclass
class Diagnostic:
    verdict: str
    sup_u_window: float
    F_a: float
    F_b: float
    tail_integral: float         # int_{y > b} S u^2
    threshold: float             # eps0 * ||S||_1
    sup_u_right: float           # sup |u| on x > b
    reasons: list

    def as_dict(self) -> dict:
        return dict(self.__dict__)

    def to_json(self, path=None) -> str:
        text = json.dumps(self.as_dict(), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def continuation_diagnostic(h: FieldHistory, k: int, iv: ProbeInterval,
                            eps0: float = EPS0) -> Diagnostic:
    """Three-valued check of the vanishing-window argument at snapshot k.

    Preconditions: sup |u| on [a, b] and |F(a)|, |F(b)| below eps0 (with u = 0
    on the window, u_t = F there).  When they hold, the mass
    int_{y > b} S u^2 must fall under eps0 ||S||_1 for "forced-zero";
    otherwise "nonzero-mass".  Failed preconditions give "inapplicable".
    """
    grid = h.grid
    _check_inside(iv, grid)
    x = grid.x
    u = h.values[k]
    Fs = CubicSpline(x, F_array(u, grid))
    F_a, F_b = float(Fs(iv.a)), float(Fs(iv.b))
    us = CubicSpline(x, u)
    window = np.concatenate([[iv.a, iv.b], x[(x > iv.a) & (x < iv.b)]])
    sup_win = float(np.max(np.abs(us(window))))
    S = WindowKernel(iv)
    right = x > iv.b
    tail = float(_gauss_pieces(_pieces(iv, iv.b, x[-1], grid.n), lambda y: S(y) * us(y) ** 2))
    sup_right = float(np.max(np.abs(u[right]))) if right.any() else 0.0
    threshold = eps0 * S.l1_norm

    reasons = []
    if sup_win >= eps0:
        reasons.append(f"sup|u| on [a,b] = {sup_win:.3g} >= eps0")
    if abs(F_a) >= eps0:
        reasons.append(f"|F(a)| = {abs(F_a):.3g} >= eps0")
    if abs(F_b) >= eps0:
        reasons.append(f"|F(b)| = {abs(F_b):.3g} >= eps0")
    if reasons:
        verdict = "inapplicable"
    elif tail < threshold:
        verdict = "forced-zero"
    else:
        verdict = "nonzero-mass"
    return Diagnostic(verdict, sup_win, F_a, F_b, tail, threshold, sup_right, reasons)


def bump(center: float, radius: float, height: float = 1.0):
    """Smooth compactly supported bump exp(1 - 1/(1 - r^2)) on |x - center| < radius."""
    def fn(x):
        r = (np.asarray(x, dtype=float) - center) / radius
        out = np.zeros_like(r)
        inside = np.abs(r) < 1
        out[inside] = height * np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
        return out
    return fn
