"""Local conserved currents and the quantities they integrate to.

Currents (density C0, flux C1):

    current1: (u - u_xx,  2u_x^2 - 2u^2 - 2u u_x + 2u u_xx)
    current2: (e^{-2x}(u + 2u_x + u_xx),  2e^{-2x}(u_t - 3u_x^2 - 3u u_x + u_tx - 3u u_xx))
    current3: (f e^{x}(u - u_xx),  e^{x}[f (2u_x^2 - 4u u_x + 2u u_xx) - f'(u - u_x)])

Off solutions, D_t C0 + D_x C1 equals (multiplier) x residual with
multipliers 1, -3 e^{-2x} and f(t) e^{x}.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .jets import DECAY_TOL, Field, FieldHistory, Jet3, diff_array

CURRENT_IDS = ("current1", "current2", "current3")
WEIGHT_CLIP = 1e12


def _one(t):
    return np.ones_like(np.asarray(t, dtype=float))


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class CurrentPair:
    id: str
    f: Callable = _one
    fprime: Callable = _zero
    label: str = ""

    def __post_init__(self):
        if self.id not in CURRENT_IDS:
            raise ValueError(f"unknown current {self.id!r}")

    @classmethod
    def exp_weighted(cls, rate: float = 1.0) -> "CurrentPair":
        """current3 with f(t) = exp(rate t)."""
        return cls("current3", lambda t: np.exp(rate * np.asarray(t)),
                   lambda t: rate * np.exp(rate * np.asarray(t)), label=f"f=exp({rate:g}t)")

    @property
    def name(self) -> str:
        return self.id + (f"[{self.label}]" if self.label else "")


def density(cp: CurrentPair, j: Jet3):
    x = j.x
    if cp.id == "current1":
        return j.u - j.uxx
    if cp.id == "current2":
        return np.exp(-2 * x) * (j.u + 2 * j.ux + j.uxx)
    return cp.f(j.t) * np.exp(x) * (j.u - j.uxx)


def flux(cp: CurrentPair, j: Jet3):
    u, ux, uxx, x = j.u, j.ux, j.uxx, j.x
    if cp.id == "current1":
        return 2 * ux**2 - 2 * u**2 - 2 * u * ux + 2 * u * uxx
    if cp.id == "current2":
        return 2 * np.exp(-2 * x) * (j.ut - 3 * ux**2 - 3 * u * ux + j.utx - 3 * u * uxx)
    A = 2 * ux**2 - 4 * u * ux + 2 * u * uxx
    return np.exp(x) * (cp.f(j.t) * A - cp.fprime(j.t) * (u - ux))


def multiplier(cp: CurrentPair, t, x):
    if cp.id == "current1":
        return np.ones_like(np.asarray(x, dtype=float))
    if cp.id == "current2":
        return -3 * np.exp(-2 * np.asarray(x))
    return cp.f(t) * np.exp(x)


def total_divergence(cp: CurrentPair, j: Jet3):
    """D_t C0 + D_x C1 expanded by the product rule."""
    u, ux, uxx, uxxx = j.u, j.ux, j.uxx, j.uxxx
    ut, utx, utxx = j.ut, j.utx, j.utxx
    if cp.id == "current1":
        dt_c0 = ut - utxx
        dx_c1 = 4 * ux * uxx - 4 * u * ux - 2 * ux**2 - 2 * u * uxx + 2 * ux * uxx + 2 * u * uxxx
        return dt_c0 + dx_c1
    if cp.id == "current2":
        w = np.exp(-2 * j.x)
        B = ut - 3 * ux**2 - 3 * u * ux + utx - 3 * u * uxx
        Bx = (utx - 6 * ux * uxx - 3 * ux**2 - 3 * u * uxx + utxx
              - 3 * ux * uxx - 3 * u * uxxx)
        return w * (ut + 2 * utx + utxx) + 2 * w * (Bx - 2 * B)
    w = np.exp(j.x)
    f, fp = cp.f(j.t), cp.fprime(j.t)
    m = u - uxx
    A = 2 * ux**2 - 4 * u * ux + 2 * u * uxx
    Ax = 6 * ux * uxx - 4 * ux**2 - 4 * u * uxx + 2 * u * uxxx
    dt_c0 = w * (fp * m + f * (ut - utxx))
    dx_c1 = w * (f * A - fp * (u - ux)) + w * (f * Ax - fp * (ux - uxx))
    return dt_c0 + dx_c1


# ---------------------------------------------------------------------------
# conserved quantities


@dataclass
class QuantityValue:
    value: float
    clipped: bool = False
    decaying: bool = True


def quantity(cp: CurrentPair, f: Field) -> QuantityValue:
    """Trapezoid integral of the density over the grid.

    current1 integrates u alone: u - u_xx and u differ by an exact x-derivative.
    Exponential weights beyond WEIGHT_CLIP are dropped and flagged.
    """
    grid, v, x = f.grid, f.values, f.grid.x
    decaying = bool(max(abs(v[0]), abs(v[-1])) < DECAY_TOL)
    if cp.id == "current1":
        return QuantityValue(grid.integrate(v), False, decaying)
    vxx = diff_array(v, grid.dx, 2)
    if cp.id == "current2":
        vx = diff_array(v, grid.dx, 1)
        logw = -2 * x
        integrand = v + 2 * vx + vxx
        scale = 1.0
    else:
        logw = x
        integrand = v - vxx
        scale = float(cp.f(f.t))
    keep = logw <= math.log(WEIGHT_CLIP)
    weighted = np.where(keep, np.exp(np.minimum(logw, math.log(WEIGHT_CLIP))) * integrand, 0.0)
    return QuantityValue(scale * grid.integrate(weighted), bool(not keep.all()), decaying)


@dataclass
class QuantityReport:
    id: str
    times: np.ndarray
    values: np.ndarray
    floor: float = 1e-14
    clipped: bool = False
    decaying: bool = True

    @property
    def relative_drift(self) -> float:
        v = self.values
        return float(np.max(np.abs(v - v[0])) / max(abs(v[0]), self.floor))

    def summary(self) -> dict:
        return {"id": self.id, "initial": float(self.values[0]), "final": float(self.values[-1]),
                "relative_drift": self.relative_drift, "clipped": self.clipped,
                "decaying": self.decaying, "samples": int(self.values.size)}

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time", "value"])
            for t, v in zip(self.times, self.values):
                w.writerow([repr(float(t)), repr(float(v))])

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)


def drift_monitor(cp: CurrentPair, h: FieldHistory) -> QuantityReport:
    vals = [quantity(cp, h.snapshot(k)) for k in range(len(h))]
    return QuantityReport(
        cp.name, h.times.copy(), np.array([q.value for q in vals]),
        clipped=any(q.clipped for q in vals), decaying=all(q.decaying for q in vals))


def standard_currents() -> list[CurrentPair]:
    """H1, H2, H3 with f = 1 and H3 with f = e^t."""
    return [CurrentPair("current1"), CurrentPair("current2"),
            CurrentPair("current3", label="f=1"), CurrentPair.exp_weighted(1.0)]
