import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from novikov.jets import DecayWarning, Field, SpaceGrid, interior_mask
from novikov.kernels import (G_kernel, convolve, convolve_array, g_kernel, g_prime,
                             gaussian_smoothed, helmholtz_apply)

# G * exp(-x^2) at 0 = e^{1/4} sqrt(pi)/2 erfc(1/2), evaluated with mpmath
G_GAUSS_AT_0 = 0.545641360765047042099387827377


def test_kernel_values():
    assert G_kernel(0.0) == 0.5
    assert G_kernel(-1.0) == pytest.approx(np.exp(-1.0))
    assert G_kernel(2.0) == 0.0
    assert g_kernel(0.0) == 0.5


@given(st.floats(-30, 30).filter(lambda v: abs(v) > 1e-9))
def test_G_is_g_plus_derivative_off_origin(x):
    assert abs(G_kernel(x) - (g_kernel(x) + g_prime(x))) < 1e-12


@given(st.floats(-50, -1e-9))
def test_G_positive_left(x):
    assert G_kernel(x) > 0


def test_g_integrates_to_one():
    # (g * 1)(0) is the integral of g over [-L, L]
    g = SpaceGrid(40.0, 8001)
    total = convolve_array("g", np.ones(g.n), g)[g.n // 2]
    assert abs(total - 1.0) < 1e-8


def test_convolve_zero():
    g = SpaceGrid(15.0, 256)
    assert np.all(convolve("g", Field(g, 0.0, np.zeros(g.n))).values == 0)


def test_helmholtz_round_trip():
    g = SpaceGrid(15.0, 2048)
    m = np.exp(-g.x**2)
    u = convolve("g", Field(g, 0.0, m))
    back = helmholtz_apply(u).values
    assert np.max(np.abs(back - m)) < 1e-5


def test_convolve_inverts_helmholtz():
    g = SpaceGrid(15.0, 2048)
    u = np.exp(-g.x**2)
    m = helmholtz_apply(Field(g, 0.0, u))
    assert np.max(np.abs(convolve("g", m).values - u)) < 1e-5


def test_G_gaussian_at_zero_matches_oracle():
    g = SpaceGrid(15.0, 2049)
    vals = convolve_array("G", np.exp(-g.x**2), g)
    assert abs(vals[g.n // 2] - G_GAUSS_AT_0) < 1e-7


def test_gaussian_smoothed_closed_form():
    g = SpaceGrid(15.0, 2049)
    num = convolve_array("g", 0.5 * np.exp(-g.x**2), g)
    assert np.max(np.abs(num - gaussian_smoothed(g.x, 0.5))) < 1e-9
    assert gaussian_smoothed(0.0, 1.0) == pytest.approx(G_GAUSS_AT_0, abs=1e-14)
    assert np.all(np.isfinite(gaussian_smoothed(np.array([-800.0, 800.0]), 1.0)))


@pytest.mark.parametrize("kind", ["g", "G"])
@pytest.mark.parametrize("quadrature", ["trapezoid", "cubic"])
def test_fast_path_matches_direct(kind, quadrature):
    g = SpaceGrid(10.0, 301)
    f = np.exp(-(g.x - 1) ** 2) * (1 + 0.3 * np.sin(3 * g.x))
    fast = convolve_array(kind, f, g, quadrature, fast=True)
    direct = convolve_array(kind, f, g, quadrature, fast=False)
    assert np.max(np.abs(fast - direct)) < 1e-10


def test_cubic_rule_is_fourth_order():
    errs = []
    for n in (513, 1025):
        g = SpaceGrid(15.0, n)
        errs.append(np.max(np.abs(convolve_array("g", np.exp(-g.x**2), g)
                                  - gaussian_smoothed(g.x, 1.0))))
    assert errs[0] / errs[1] > 12


def test_helmholtz_constant_and_sin():
    g = SpaceGrid(10.0, 1024)
    assert np.allclose(helmholtz_apply(Field(g, 0.0, np.full(g.n, 2.0))).values, 2.0)
    out = helmholtz_apply(Field(g, 0.0, np.sin(g.x))).values
    assert np.max(np.abs(out - 2 * np.sin(g.x))) < 1e-6


def test_convolution_linear_and_translation_equivariant(rng):
    g = SpaceGrid(15.0, 1201)
    a, b = rng.normal(size=2)
    f1, f2 = np.exp(-g.x**2), np.exp(-(g.x - 1) ** 2 / 2)
    lhs = convolve_array("G", a * f1 + b * f2, g)
    assert np.allclose(lhs, a * convolve_array("G", f1, g) + b * convolve_array("G", f2, g),
                       atol=1e-13)
    shift = 40
    moved = np.roll(f1, shift)
    inner = interior_mask(g.n, 200)
    c0 = convolve_array("G", f1, g)
    c1 = convolve_array("G", moved, g)
    assert np.max(np.abs(np.roll(c0, shift) - c1)[inner]) < 1e-7


def test_decay_warning():
    g = SpaceGrid(5.0, 64)
    with pytest.warns(DecayWarning):
        convolve("g", Field(g, 0.0, np.ones(g.n)))
    with warnings.catch_warnings():
        warnings.simplefilter("error", DecayWarning)
        convolve("g", Field(g, 0.0, np.zeros(g.n)))


def test_unknown_kernel():
    g = SpaceGrid(5.0, 64)
    with pytest.raises(ValueError):
        convolve_array("h", np.zeros(g.n), g)
