"""Green's function of 1 - d^2/dx^2 and the one-sided kernel G = g + g'.

    g(x) = exp(-|x|) / 2
    G(x) = (1 - sgn x) g(x)     (= exp(x) for x < 0, 1/2 at 0, 0 for x > 0)

Convolutions are computed on the truncated grid with zero extension, with
one of two quadrature rules:

* ``trapezoid``: plain trapezoid sum with G(0) = 1/2.  Second order, because
  the kernels have a kink (g) or jump (G) at the evaluation node.
* ``cubic``: cell integrals exact for the local cubic interpolant of the
  integrand against the exponential weight.  Fourth order; the default.

Each rule has an O(N^2) dense-matrix reference (``fast=False``) and an O(N)
exponential recursion (``fast=True``) that must agree with it to rounding.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.signal import lfilter

from .jets import Field, SpaceGrid, check_decay, diff_array

KINDS = ("g", "G")


def g_kernel(x):
    return 0.5 * np.exp(-np.abs(x))


def G_kernel(x):
    x = np.asarray(x, dtype=float)
    return (1.0 - np.sign(x)) * g_kernel(x)


def g_prime(x):
    """Derivative of g away from the origin."""
    return -np.sign(x) * g_kernel(x)


def kernel(kind: str):
    if kind == "g":
        return g_kernel
    if kind == "G":
        return G_kernel
    raise ValueError(f"unknown kernel {kind!r}")


@lru_cache(maxsize=8)
def _direct_matrix(kind: str, half_length: float, n: int) -> np.ndarray:
    grid = SpaceGrid(half_length, n)
    x = grid.x
    K = kernel(kind)(x[:, None] - x[None, :]) * grid.trapezoid_weights[None, :]
    K.setflags(write=False)
    return K


def _sweep(values, r):
    """y_i = values_i + r y_{i-1}."""
    return lfilter([1.0], [1.0, -r], values, axis=-1)


def _right_sum(c, r):
    # S_i = sum_{j >= i} r^(j-i) c_j
    return _sweep(c[..., ::-1], r)[..., ::-1]


def _left_sum(c, r):
    return _sweep(c, r)


@lru_cache(maxsize=16)
def _cubic_cell_weights(dx: float):
    """Weights of int_0^dx exp(-s) p(s) ds for the cubic p through 4 nodes.

    Row k corresponds to the cell [x_i, x_i + dx] with interpolation nodes
    x_{i+k-1}, ..., x_{i+k+2}, k = 0 (left boundary cell), 1 (interior),
    2 (right boundary cell).
    """
    gl_s, gl_w = np.polynomial.legendre.leggauss(12)
    s = 0.5 * dx * (gl_s + 1.0)
    w = 0.5 * dx * gl_w * np.exp(-s)
    out = np.empty((3, 4))
    for row, first in enumerate((0, -1, -2)):
        nodes = dx * np.arange(first, first + 4)
        for k in range(4):
            others = np.delete(nodes, k)
            lag = np.prod([(s - o) / (nodes[k] - o) for o in others], axis=0)
            out[row, k] = np.dot(w, lag)
    out.setflags(write=False)
    return out


def _cell_integrals(h, dx):
    """int_0^dx exp(-s) h(x_i + s) ds for each cell i = 0..N-2 (last axis)."""
    W = _cubic_cell_weights(dx)
    n = h.shape[-1]
    cells = np.empty(h.shape[:-1] + (n - 1,))
    # interior cells use nodes i-1..i+2
    cells[..., 1:n - 2] = (W[1, 0] * h[..., 0:n - 3] + W[1, 1] * h[..., 1:n - 2]
                           + W[1, 2] * h[..., 2:n - 1] + W[1, 3] * h[..., 3:n])
    cells[..., 0] = W[0] @ np.moveaxis(h[..., 0:4], -1, 0)
    cells[..., n - 2] = W[2] @ np.moveaxis(h[..., n - 4:n], -1, 0)
    return cells


def _cubic_right(h, dx):
    """R_i = int_{x_i}^{x_{N-1}} exp(x_i - y) h(y) dy."""
    r = np.exp(-dx)
    cells = _cell_integrals(h, dx)
    out = np.zeros_like(h)
    out[..., :-1] = _right_sum(cells, r)
    return out


def _cubic_left(h, dx):
    """L_i = int_{x_0}^{x_i} exp(y - x_i) h(y) dy."""
    mirrored = _cubic_right(h[..., ::-1], dx)
    return mirrored[..., ::-1]


def _trapezoid_fast(kind, values, grid):
    c = values * grid.trapezoid_weights
    r = np.exp(-grid.dx)
    right = _right_sum(c, r)
    if kind == "G":
        return right - 0.5 * c
    return 0.5 * (right + _left_sum(c, r) - c)


def _cubic_fast(kind, values, grid):
    right = _cubic_right(values, grid.dx)
    if kind == "G":
        return right
    return 0.5 * (right + _cubic_left(values, grid.dx))


@lru_cache(maxsize=8)
def _cubic_matrix(kind: str, half_length: float, n: int) -> np.ndarray:
    """Dense matrix of the cubic rule: (cell decay) @ (cell interpolation weights)."""
    grid = SpaceGrid(half_length, n)
    dx = grid.dx
    W = _cubic_cell_weights(dx)
    cell = np.zeros((n - 1, n))
    for c in range(n - 1):
        if c == 0:
            cell[c, 0:4] = W[0]
        elif c == n - 2:
            cell[c, n - 4:n] = W[2]
        else:
            cell[c, c - 1:c + 3] = W[1]
    i = np.arange(n)[:, None]
    c = np.arange(n - 1)[None, :]
    decay = np.where(c >= i, np.exp(-(c - i) * dx), 0.0)
    right = decay @ cell
    if kind == "G":
        K = right
    else:
        P = np.eye(n)[::-1]
        K = 0.5 * (right + P @ right @ P)
    K.setflags(write=False)
    return K


def convolve_array(kind: str, values, grid: SpaceGrid, quadrature: str = "cubic",
                   fast: bool = True):
    """(k * f)(x_i) for an array whose last axis runs over the grid."""
    if kind not in KINDS:
        raise ValueError(f"unknown kernel {kind!r}")
    values = np.asarray(values, dtype=float)
    if quadrature == "trapezoid":
        if fast:
            return _trapezoid_fast(kind, values, grid)
        return values @ _direct_matrix(kind, grid.half_length, grid.n).T
    if quadrature == "cubic":
        if fast:
            return _cubic_fast(kind, values, grid)
        return values @ _cubic_matrix(kind, grid.half_length, grid.n).T
    raise ValueError(f"unknown quadrature {quadrature!r}")


def convolve(kind: str, f: Field, quadrature: str = "cubic", fast: bool = True,
             warn: bool = True) -> Field:
    """Convolve a field with g or G, zero-extended outside the grid."""
    if warn:
        check_decay(f.values, f"convolve({kind})")
    return Field(f.grid, f.t, convolve_array(kind, f.values, f.grid, quadrature, fast))


def helmholtz_apply_array(values, dx: float):
    return np.asarray(values) - diff_array(values, dx, 2)


def helmholtz_apply(f: Field) -> Field:
    """(1 - d^2/dx^2) f."""
    return Field(f.grid, f.t, helmholtz_apply_array(f.values, f.grid.dx))


def gaussian_smoothed(x, amplitude: float = 1.0):
    """Closed form of g * (amplitude exp(-y^2)), i.e. u with m = amplitude exp(-x^2)."""
    x = np.asarray(x, dtype=float)
    return amplitude * np.sqrt(np.pi) / 4 * np.exp(0.25) * (_exp_erfc(x) + _exp_erfc(-x))


def _exp_erfc(x):
    """exp(x) erfc(x + 1/2) without overflow."""
    from scipy.special import erfc, erfcx

    z = x + 0.5
    zp = np.maximum(z, 0.0)
    big = np.exp(x - zp**2) * erfcx(zp)
    small = np.exp(np.minimum(x, 0.0)) * erfc(np.minimum(z, 0.0))
    return np.where(z > 0, big, small)
