"""Cauchy problem on a truncated line, fixed-step RK4.

Two equivalent forms of the equation are integrated:

* ``nonlocal_u``:   u_t = 2 u u_x - u^2 + G * u^2
* ``m_transport``:  m_t = 2 u m_x + 6 u_x m - 2 u m + 2 (u - u_x)^2,  u = g * m

The first is the production path; the second exists to cross-check it.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .jets import Field, FieldHistory, SpaceGrid, check_decay, diff_array
from .kernels import convolve_array, gaussian_smoothed, helmholtz_apply_array

log = logging.getLogger(__name__)

FORMULATIONS = ("nonlocal_u", "m_transport")


class SolverError(RuntimeError):
    pass


class CFLViolation(SolverError):
    pass


class BlowUp(SolverError):
    """max|u| exceeded the threshold or became non-finite; ``history`` holds the run so far."""

    def __init__(self, t: float, history: FieldHistory | None):
        super().__init__(f"blow-up at t={t:g}")
        self.t = t
        self.history = history


@dataclass(frozen=True)
class SolverConfig:
    grid: SpaceGrid
    dt: float
    t_end: float
    formulation: str = "nonlocal_u"
    blowup_threshold: float = 1e6
    snapshot_stride: int = 1
    quadrature: str = "cubic"

    def __post_init__(self):
        if not (self.dt > 0 and self.t_end > 0):
            raise ValueError("dt and t_end must be positive")
        if self.formulation not in FORMULATIONS:
            raise ValueError(f"unknown formulation {self.formulation!r}")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def max_stable_dt(self, umax: float) -> float:
        return 0.5 * self.grid.dx / max(1.0, 2.0 * umax)


@dataclass(frozen=True, eq=False)
class CauchyProblem:
    """Initial data; ``m0`` is optional and only used by the m-transport form."""

    u0: Callable | Field
    m0: Callable | None = None
    label: str = ""

    def initial_u(self, grid: SpaceGrid) -> np.ndarray:
        if isinstance(self.u0, Field):
            if self.u0.grid != grid:
                raise ValueError("initial field lives on a different grid")
            return self.u0.values.copy()
        return np.asarray(self.u0(grid.x), dtype=float)

    def initial_m(self, grid: SpaceGrid) -> np.ndarray:
        if self.m0 is not None:
            return np.asarray(self.m0(grid.x), dtype=float)
        return helmholtz_apply_array(self.initial_u(grid), grid.dx)

    @classmethod
    def gaussian(cls, amplitude: float = 0.5) -> "CauchyProblem":
        """u0 = g * (amplitude exp(-x^2)); the reference data."""
        return cls(u0=lambda x: gaussian_smoothed(x, amplitude),
                   m0=lambda x: amplitude * np.exp(-np.asarray(x) ** 2),
                   label=f"gaussian(amplitude={amplitude:g})")


def rhs_nonlocal_array(u, grid: SpaceGrid, quadrature: str = "cubic"):
    ux = diff_array(u, grid.dx, 1)
    return 2 * u * ux - u**2 + convolve_array("G", u**2, grid, quadrature)


def rhs_m_transport_array(m, grid: SpaceGrid, quadrature: str = "cubic"):
    u = convolve_array("g", m, grid, quadrature)
    ux = diff_array(u, grid.dx, 1)
    mx = diff_array(m, grid.dx, 1)
    return 2 * u * mx + 6 * ux * m - 2 * u * m + 2 * (u - ux) ** 2


def rhs_nonlocal(u: Field, quadrature: str = "cubic") -> Field:
    return Field(u.grid, u.t, rhs_nonlocal_array(u.values, u.grid, quadrature))


def rhs_m_transport(m: Field, quadrature: str = "cubic") -> Field:
    return Field(m.grid, m.t, rhs_m_transport_array(m.values, m.grid, quadrature))


def _rk4_step(f, y, dt):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def run(problem: CauchyProblem, cfg: SolverConfig, check_boundary: bool = True) -> FieldHistory:
    """Integrate to ``cfg.t_end``; snapshots of u every ``snapshot_stride`` steps.

    Raises BlowUp (carrying the partial history) or CFLViolation.
    """
    grid = cfg.grid
    u0 = problem.initial_u(grid)
    if check_boundary:
        check_decay(u0, "initial data")

    if cfg.formulation == "nonlocal_u":
        y = u0
        def f(v):
            return rhs_nonlocal_array(v, grid, cfg.quadrature)
        def to_u(v):
            return v
    else:
        y = problem.initial_m(grid)
        def f(v):
            return rhs_m_transport_array(v, grid, cfg.quadrature)
        def to_u(v):
            return convolve_array("g", v, grid, cfg.quadrature)

    times = [0.0]
    snaps = [to_u(y)]
    u0max = float(np.max(np.abs(snaps[0]))) if np.all(np.isfinite(snaps[0])) else np.inf

    def partial():
        return FieldHistory(grid, np.array(times), np.array(snaps), _meta(cfg, problem))

    if not u0max <= cfg.blowup_threshold:
        raise BlowUp(0.0, partial())

    umax = u0max
    peak = u0max
    for step in range(1, cfg.n_steps + 1):
        if cfg.dt > cfg.max_stable_dt(umax) * (1 + 1e-12):
            raise CFLViolation(
                f"dt={cfg.dt:g} exceeds {cfg.max_stable_dt(umax):g} at t={(step - 1) * cfg.dt:g}")
        y = _rk4_step(f, y, cfg.dt)
        u = to_u(y) if cfg.formulation != "nonlocal_u" else y
        umax = float(np.max(np.abs(u)))
        t = step * cfg.dt
        if not np.isfinite(umax) or umax > cfg.blowup_threshold:
            times.append(t)
            snaps.append(u)
            raise BlowUp(t, partial())
        peak = max(peak, umax)
        if step % cfg.snapshot_stride == 0 or step == cfg.n_steps:
            times.append(t)
            snaps.append(u)

    if peak > 2 * u0max:
        warnings.warn(f"sup norm grew from {u0max:.4g} to {peak:.4g} (> 2x initial)",
                      RuntimeWarning, stacklevel=2)
    log.debug("run finished: %d steps, peak |u| %.4g", cfg.n_steps, peak)
    return partial()


def _meta(cfg: SolverConfig, problem: CauchyProblem) -> dict:
    return {"dt": cfg.dt, "formulation": cfg.formulation, "stride": cfg.snapshot_stride,
            "problem": problem.label, "half_length": cfg.grid.half_length, "n": cfg.grid.n}


def reference_config(n: int = 2048, dt: float = 1e-3, t_end: float = 1.0,
                     formulation: str = "nonlocal_u", stride: int = 1) -> SolverConfig:
    return SolverConfig(SpaceGrid(15.0, n), dt=dt, t_end=t_end,
                        formulation=formulation, snapshot_stride=stride)
