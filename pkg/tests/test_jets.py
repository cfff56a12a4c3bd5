import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from novikov.jets import (Field, FieldHistory, GridError, Jet3, SpaceGrid, diff_t, diff_x,
                          eq_residual, fd_weights, history_jets, interior_mask, jet_field)

finite = st.floats(-10, 10, allow_nan=False)


def residual_reordered(j):
    # same polynomial, grouped by u
    return (j.ut - j.utxx) - (j.u * (4 * j.ux + 2 * j.uxx - 2 * j.uxxx)
                              + j.ux * (2 * j.ux - 6 * j.uxx))


def test_zero_jet_residual():
    assert eq_residual(Jet3.zero()) == 0.0


def test_travelling_exp_jet_residual():
    j = Jet3(0.0, 0.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0)
    assert eq_residual(j) == 0.0


def test_sqrt_grow_jet_residual():
    # u = sqrt(e^{2x} + 1) at x = 0
    u = np.sqrt(2.0)
    u1 = 1 / u
    u2 = (2 - u1**2) / u
    u3 = (4 - 3 * u1 * u2) / u
    assert abs(eq_residual(Jet3(0.0, 0.0, u, u1, u2, u3, 0.0, 0.0, 0.0))) < 1e-14


def test_residual_matches_second_implementation(rng):
    vals = rng.uniform(-3, 3, (7, 1000))
    j = Jet3(0.0, 0.0, *vals)
    a, b = eq_residual(j), residual_reordered(j)
    assert np.all(np.abs(a - b) <= 1e-12 * np.maximum(1.0, np.abs(a)))


@given(st.tuples(*[finite] * 7), finite, finite)
def test_residual_linear_in_time_derivatives(vals, dut, dutxx):
    j = Jet3(0.0, 0.0, *vals)
    k = Jet3(0.0, 0.0, *vals[:4], vals[4] + dut, vals[5], vals[6] + dutxx)
    assert eq_residual(k) - eq_residual(j) == pytest.approx(dut - dutxx, abs=1e-9)


def test_jet_rejects_non_finite():
    with pytest.raises(ValueError):
        Jet3(0.0, 0.0, np.nan, 0, 0, 0, 0, 0, 0)


def test_grid_validation():
    with pytest.raises(ValueError):
        SpaceGrid(1.0, 8)
    with pytest.raises(ValueError):
        SpaceGrid(-1.0, 32)
    g = SpaceGrid(10.0, 101)
    assert g.dx == pytest.approx(0.2)
    assert np.all(np.diff(g.x) > 0)


def test_fd_weights_central():
    assert np.allclose(fd_weights([-2, -1, 0, 1, 2], 1), [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12])


def test_diff_constant_is_zero():
    g = SpaceGrid(5.0, 64)
    f = Field(g, 0.0, np.full(g.n, 3.0))
    for k in (1, 2, 3):
        assert np.max(np.abs(diff_x(f, k).values)) < 1e-10


def test_diff_sin_accuracy():
    g = SpaceGrid(10.0, 1024)
    f = Field(g, 0.0, np.sin(g.x))
    assert np.max(np.abs(diff_x(f, 1).values - np.cos(g.x))) < 1e-6


def test_diff_exp_second_order_derivative():
    g = SpaceGrid(5.0, 1024)
    f = Field(g, 0.0, np.exp(g.x))
    inner = interior_mask(g.n)
    err = np.abs(diff_x(f, 2).values - np.exp(g.x))[inner]
    assert err.max() < 1e-6


def _exact_derivative(order):
    s = sp.symbols("s")
    return sp.lambdify(s, sp.diff(sp.sin(2 * s) * sp.exp(-s**2 / 4), s, order), "numpy")


@pytest.mark.parametrize("order", [1, 2, 3])
def test_diff_convergence_order(order):
    errs = []
    for n in (129, 257):
        g = SpaceGrid(3.0, n)
        f = Field(g, 0.0, np.sin(2 * g.x) * np.exp(-g.x**2 / 4))
        exact = _exact_derivative(order)(g.x)
        errs.append(np.max(np.abs(diff_x(f, order).values - exact)))
    assert errs[0] / errs[1] >= 12


def test_diff_grid_too_small():
    g = SpaceGrid(1.0, 16)
    with pytest.raises(GridError):
        from novikov.jets import diff_array
        diff_array(np.zeros(5), g.dx, 3)


def _travelling_history(n=1024, dt=1e-3, steps=5, c=1.0):
    g = SpaceGrid(2.0, n)
    times = dt * np.arange(steps)
    return FieldHistory.from_function(g, lambda t, x: np.exp(x - c * t), times)


def test_diff_t_constant_history():
    g = SpaceGrid(2.0, 64)
    h = FieldHistory.from_function(g, lambda t, x: 0 * x + 2.0, [0.0, 0.1, 0.2])
    assert np.all(diff_t(h, 1).values == 0)


def test_diff_t_travelling():
    h = _travelling_history()
    for k in range(len(h)):
        u = h.values[k]
        assert np.max(np.abs(diff_t(h, k).values + u)) < 1e-5


def test_diff_t_needs_three_snapshots():
    g = SpaceGrid(2.0, 64)
    h = FieldHistory.single(Field(g, 0.0, np.zeros(g.n)))
    with pytest.raises(GridError):
        diff_t(h, 0)


def test_history_requires_zero_start_and_increasing_times():
    g = SpaceGrid(2.0, 32)
    with pytest.raises(ValueError):
        FieldHistory(g, np.array([0.1, 0.2]), np.zeros((2, 32)))
    with pytest.raises(ValueError):
        FieldHistory(g, np.array([0.0, 0.0]), np.zeros((2, 32)))


def test_jet_field_constant_solution():
    g = SpaceGrid(2.0, 64)
    h = FieldHistory.from_function(g, lambda t, x: 0 * x + 1.5, [0.0, 0.1, 0.2])
    j = jet_field(h, 1)
    assert np.all(j.u == 1.5)
    for name in ("ux", "uxx", "uxxx", "ut", "utx", "utxx"):
        assert np.max(np.abs(getattr(j, name))) < 1e-10


def test_jet_field_travelling_residual():
    h = _travelling_history()
    j = jet_field(h, 2)
    inner = interior_mask(h.grid.n)
    assert np.max(np.abs(eq_residual(j))[inner]) < 1e-4


def test_history_jets_shape():
    h = _travelling_history(n=128)
    j = history_jets(h, [1, 3])
    assert j.u.shape == (2, 128)


def test_empty_history_has_no_jets():
    g = SpaceGrid(2.0, 32)
    h = FieldHistory(g, np.array([]), np.zeros((0, 32)))
    with pytest.raises(GridError):
        jet_field(h, 0)
