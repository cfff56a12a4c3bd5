import warnings

import numpy as np
import pytest

from novikov.jets import DecayWarning, Field, SpaceGrid, interior_mask
from novikov.kernels import convolve_array, gaussian_smoothed, helmholtz_apply_array
from novikov.solver import (BlowUp, CauchyProblem, CFLViolation, SolverConfig, rhs_m_transport,
                            rhs_nonlocal, run)
from novikov.jets import diff_array

pytestmark = pytest.mark.filterwarnings("ignore::novikov.jets.DecayWarning")


def test_rhs_zero():
    g = SpaceGrid(5.0, 64)
    z = Field(g, 0.0, np.zeros(g.n))
    assert np.all(rhs_nonlocal(z).values == 0)
    assert np.all(rhs_m_transport(z).values == 0)


def test_rhs_of_non_decaying_exponential():
    # u = e^x solves the local equation with u_t = -c u for every c, but the
    # zero-extended convolution gives G * u^2 = e^{x+L} - u^2, so the nonlocal
    # right side is e^{x+L}: the two forms only agree for decaying data
    L = 5.0
    g = SpaceGrid(L, 2048)
    u = np.exp(g.x)
    rhs = rhs_nonlocal(Field(g, 0.0, u)).values
    inner = interior_mask(g.n)
    assert np.max(np.abs(rhs / np.exp(g.x + L) - 1)[inner]) < 1e-6
    local = 2 * u * diff_array(u, g.dx, 1) - u**2
    assert np.max(np.abs(local - u**2)[inner] / u[inner] ** 2) < 1e-9


def test_rhs_forms_agree_on_gaussian_data():
    g = SpaceGrid(15.0, 2048)
    u = gaussian_smoothed(g.x, 1.0)
    ux, uxx, uxxx = (diff_array(u, g.dx, k) for k in (1, 2, 3))
    third = 4 * u * ux + 2 * ux**2 + 2 * u * uxx - 6 * ux * uxx - 2 * u * uxxx
    inner = interior_mask(g.n, 20)
    diff = rhs_nonlocal(Field(g, 0.0, u)).values - convolve_array("g", third, g)
    assert np.max(np.abs(diff)[inner]) < 1e-5


def test_m_transport_equals_helmholtz_of_nonlocal(rng):
    g = SpaceGrid(15.0, 2048)
    c = rng.uniform(-1, 1, 3)
    m = sum(ci * np.exp(-(g.x - k) ** 2) for ci, k in zip(c, (-1.0, 0.0, 1.5)))
    u = convolve_array("g", m, g)
    lhs = rhs_m_transport(Field(g, 0.0, m)).values
    rhs = helmholtz_apply_array(rhs_nonlocal(Field(g, 0.0, u)).values, g.dx)
    inner = interior_mask(g.n, 20)
    assert np.max(np.abs(lhs - rhs)[inner]) < 1e-5


def test_zero_data_stays_zero():
    cfg = SolverConfig(SpaceGrid(5.0, 64), 0.01, 0.1)
    h = run(CauchyProblem(u0=lambda x: np.zeros_like(x)), cfg)
    assert np.all(h.values == 0)
    assert h.times[0] == 0 and len(h) == 11


def test_reference_run_conserves_H1(reference_history):
    h = reference_history
    grid = h.grid
    H1 = np.array([grid.integrate(v) for v in h.values])
    assert np.max(np.abs(H1 - H1[0])) / abs(H1[0]) < 1e-3
    assert h.times[-1] == pytest.approx(1.0)


def test_space_self_convergence():
    finals = {}
    for n in (1024, 2048):
        h = run(CauchyProblem.gaussian(0.5), SolverConfig(SpaceGrid(15.0, n), 1e-3, 1.0,
                                                          snapshot_stride=1000))
        finals[n] = h
    # compare on the coarse nodes through interpolation
    xc = finals[1024].grid.x
    fine = np.interp(xc, finals[2048].grid.x, finals[2048].values[-1])
    e = np.max(np.abs(finals[1024].values[-1] - fine))
    assert e < 1e-5


def test_cross_formulation_agrees(short_history):
    g = short_history.grid
    h2 = run(CauchyProblem.gaussian(0.5), SolverConfig(g, 2e-3, 0.2, "m_transport"))
    assert np.max(np.abs(h2.values[-1] - short_history.values[-1])) < 1e-3


def test_m_tracks_helmholtz_of_u():
    g = SpaceGrid(15.0, 1025)
    cfg = SolverConfig(g, 2e-3, 0.5, "m_transport", snapshot_stride=50)
    hm = run(CauchyProblem.gaussian(0.5), cfg)
    hu = run(CauchyProblem.gaussian(0.5), SolverConfig(g, 2e-3, 0.5, snapshot_stride=50))
    m_from_u = helmholtz_apply_array(hu.values, g.dx)
    m_from_m = helmholtz_apply_array(hm.values, g.dx)
    assert np.max(np.abs(m_from_u - m_from_m)) < 1e-4


def test_blowup_at_start():
    cfg = SolverConfig(SpaceGrid(5.0, 64), 1e-3, 0.1, blowup_threshold=10.0)
    with pytest.raises(BlowUp) as exc:
        run(CauchyProblem(u0=lambda x: 100 * np.exp(-x**2)), cfg)
    assert exc.value.t == 0.0
    assert len(exc.value.history) == 1


def test_cfl_violation():
    cfg = SolverConfig(SpaceGrid(5.0, 256), 0.5, 1.0)
    with pytest.raises(CFLViolation):
        run(CauchyProblem.gaussian(0.5), cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(SpaceGrid(5.0, 64), -1.0, 1.0)
    with pytest.raises(ValueError):
        SolverConfig(SpaceGrid(5.0, 64), 0.1, 1.0, formulation="spectral")


def test_decay_warning_on_reference_data():
    with pytest.warns(DecayWarning):
        with warnings.catch_warnings():
            warnings.simplefilter("always", DecayWarning)
            run(CauchyProblem.gaussian(0.5), SolverConfig(SpaceGrid(15.0, 64), 0.01, 0.01))
