"""Grids, sampled fields, finite differences and the equation residual.

The equation is

    u_t - u_txx = 4 u u_x + 2 u_x^2 + 2 u u_xx - 6 u_x u_xx - 2 u u_xxx

and every diagnostic in the package reduces to evaluating polynomials in the
jet coordinates ``(u, u_x, u_xx, u_xxx, u_t, u_tx, u_txx)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import scipy.sparse as sps

ArrayLike = "float | np.ndarray"

DECAY_TOL = 1e-12


class DecayWarning(RuntimeWarning):
    """Data does not decay to the truncation boundary."""


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Jet3:
    """Point values of u and its derivatives (scalars or equally shaped arrays)."""

    t: ArrayLike
    x: ArrayLike
    u: ArrayLike
    ux: ArrayLike
    uxx: ArrayLike
    uxxx: ArrayLike
    ut: ArrayLike
    utx: ArrayLike
    utxx: ArrayLike

    def __post_init__(self):
        for name in ("u", "ux", "uxx", "uxxx", "ut", "utx", "utxx"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"non-finite jet entry {name!r}")

    @classmethod
    def zero(cls, t=0.0, x=0.0) -> "Jet3":
        return cls(t, x, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    def take(self, index) -> "Jet3":
        """Index every array entry (t and x are broadcast first)."""
        shape = np.shape(self.u)
        return Jet3(**{k: np.broadcast_to(getattr(self, k), shape)[index]
                       for k in JET_FIELDS})


JET_FIELDS = ("t", "x", "u", "ux", "uxx", "uxxx", "ut", "utx", "utxx")


def eq_residual(j: Jet3):
    """u_t - u_txx minus the quadratic right-hand side."""
    u, ux, uxx, uxxx = j.u, j.ux, j.uxx, j.uxxx
    rhs = 4 * u * ux + 2 * ux**2 + 2 * u * uxx - 6 * ux * uxx - 2 * u * uxxx
    return j.ut - j.utxx - rhs


# ---------------------------------------------------------------------------
# grids and fields


@dataclass(frozen=True)
class SpaceGrid:
    half_length: float
    n: int

    def __post_init__(self):
        if not self.half_length > 0:
            raise GridError("half_length must be positive")
        if self.n < 16:
            raise GridError("need at least 16 nodes")

    @property
    def dx(self) -> float:
        return 2 * self.half_length / (self.n - 1)

    @cached_property
    def x(self) -> np.ndarray:
        x = -self.half_length + self.dx * np.arange(self.n)
        x.setflags(write=False)
        return x

    @cached_property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        w.setflags(write=False)
        return w

    def integrate(self, values) -> float:
        return float(np.dot(self.trapezoid_weights, values))


@dataclass(frozen=True, eq=False)
class Field:
    grid: SpaceGrid
    t: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise GridError(f"expected {self.grid.n} values, got {values.shape}")
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, grid: SpaceGrid, fn, t: float = 0.0) -> "Field":
        return cls(grid, t, np.asarray(fn(grid.x), dtype=float))

    def boundary_magnitude(self) -> float:
        return float(max(abs(self.values[0]), abs(self.values[-1])))


def check_decay(values, what: str = "field", tol: float = DECAY_TOL) -> bool:
    """Warn (and return False) when the boundary values exceed ``tol``."""
    mag = float(max(abs(values[..., 0]).max(), abs(values[..., -1]).max()))
    if mag >= tol:
        warnings.warn(f"{what}: boundary magnitude {mag:.3g} >= {tol:g}",
                      DecayWarning, stacklevel=3)
        return False
    return True


@dataclass(frozen=True, eq=False)
class FieldHistory:
    """Snapshots of a solution on a fixed grid; ``values[k]`` is taken at ``times[k]``."""

    grid: SpaceGrid
    times: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or values.shape != (times.size, self.grid.n):
            raise GridError("history shape mismatch")
        if times.size and times[0] != 0.0:
            raise GridError("history must start at t = 0")
        if np.any(np.diff(times) <= 0):
            raise GridError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.times.size

    def snapshot(self, k: int) -> Field:
        return Field(self.grid, float(self.times[k]), self.values[k])

    @classmethod
    def from_function(cls, grid: SpaceGrid, fn, times) -> "FieldHistory":
        """Sample ``fn(t, x)`` at every time."""
        times = np.asarray(times, dtype=float)
        return cls(grid, times, np.array([fn(t, grid.x) for t in times]))

    @classmethod
    def single(cls, f: Field) -> "FieldHistory":
        return cls(f.grid, np.array([0.0]), f.values[None, :])


# ---------------------------------------------------------------------------
# finite differences


def fd_weights(offsets, order: int) -> np.ndarray:
    """Weights w with sum_k w_k f(x + s_k h) ~ h^order f^(order)(x)."""
    s = np.asarray(offsets, dtype=float)
    p = s.size
    A = np.vander(s, p, increasing=True).T
    rhs = np.zeros(p)
    rhs[order] = np.prod(np.arange(1, order + 1))
    return np.linalg.solve(A, rhs)


_CENTRAL_HALF_WIDTH = {1: 2, 2: 2, 3: 3, 4: 3}


@lru_cache(maxsize=64)
def diff_matrix(n: int, h: float, order: int, accuracy: int = 4) -> sps.csr_matrix:
    """Sparse differentiation matrix: central interior, one-sided near the ends."""
    if accuracy == 4:
        r = _CENTRAL_HALF_WIDTH[order]
        width = order + 4
    elif accuracy == 2:
        r = 1 if order <= 2 else 2
        width = order + 2
    else:
        raise ValueError("accuracy must be 2 or 4")
    if n < max(2 * r + 1, width):
        raise GridError(f"{n} nodes too few for order-{order} stencil")
    central = fd_weights(np.arange(-r, r + 1), order)
    rows, cols, vals = [], [], []
    for i in range(n):
        if r <= i < n - r:
            idx = np.arange(i - r, i + r + 1)
            w = central
        else:
            start = 0 if i < r else n - width
            idx = np.arange(start, start + width)
            w = fd_weights(idx - i, order)
        rows.extend([i] * idx.size)
        cols.extend(idx)
        vals.extend(w)
    D = sps.csr_matrix((np.asarray(vals) / h**order, (rows, cols)), shape=(n, n))
    return D


def diff_array(values, h: float, order: int, axis: int = -1, accuracy: int = 4):
    """Differentiate ``values`` along ``axis`` with uniform spacing ``h``."""
    a = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    D = diff_matrix(a.shape[0], float(h), order, accuracy)
    out = D @ a.reshape(a.shape[0], -1)
    return np.moveaxis(out.reshape(a.shape), 0, axis)


def diff_x(f: Field, order: int) -> Field:
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    return Field(f.grid, f.t, diff_array(f.values, f.grid.dx, order))


def _uniform_step(times) -> float:
    dt = np.diff(times)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0):
        raise GridError("snapshot times are not uniform")
    return float(dt[0])


def diff_t_all(h: FieldHistory) -> np.ndarray:
    """Second-order time derivative of every snapshot."""
    if len(h) < 3:
        raise GridError("need at least 3 snapshots for a time derivative")
    return diff_array(h.values, _uniform_step(h.times), 1, axis=0, accuracy=2)


def diff_t(h: FieldHistory, k: int) -> Field:
    if len(h) < 3:
        raise GridError("need at least 3 snapshots for a time derivative")
    k = range(len(h))[k]
    lo = min(max(k - 1, 0), len(h) - 3)
    window = h.values[lo:lo + 3]
    dt = _uniform_step(h.times[lo:lo + 3])
    if k == lo + 1:
        d = (window[2] - window[0]) / (2 * dt)
    elif k == lo:
        d = (-3 * window[0] + 4 * window[1] - window[2]) / (2 * dt)
    else:
        d = (window[0] - 4 * window[1] + 3 * window[2]) / (2 * dt)
    return Field(h.grid, float(h.times[k]), d)


def jet_field(h: FieldHistory, k: int) -> Jet3:
    """Jets at every node of snapshot ``k``."""
    if len(h) == 0:
        raise GridError("empty history")
    snap = h.snapshot(k)
    ut = diff_t(h, k)
    return Jet3(
        t=snap.t, x=h.grid.x, u=snap.values,
        ux=diff_x(snap, 1).values, uxx=diff_x(snap, 2).values, uxxx=diff_x(snap, 3).values,
        ut=ut.values, utx=diff_x(ut, 1).values, utxx=diff_x(ut, 2).values,
    )


def history_jets(h: FieldHistory, indices=None) -> Jet3:
    """Jets for many snapshots at once; arrays have shape (len(indices), N)."""
    if len(h) == 0:
        raise GridError("empty history")
    idx = np.arange(len(h)) if indices is None else np.asarray(indices)
    ut_all = diff_t_all(h)
    u = h.values[idx]
    ut = ut_all[idx]
    dx = h.grid.dx
    return Jet3(
        t=h.times[idx][:, None], x=h.grid.x[None, :], u=u,
        ux=diff_array(u, dx, 1), uxx=diff_array(u, dx, 2), uxxx=diff_array(u, dx, 3),
        ut=ut, utx=diff_array(ut, dx, 1), utxx=diff_array(ut, dx, 2),
    )


def interior_mask(n: int, margin: int = 3) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    m[margin:n - margin] = True
    return m
