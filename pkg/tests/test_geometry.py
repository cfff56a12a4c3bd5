import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_jet
from novikov import solutions as sol
from novikov.geometry import (PSSParams, acceptance_params, audit_json, brioschi,
                              expected_nongeneric, frame_coeffs, gauss_curvature, genericity,
                              metric, metric_from_history, metric_from_solution, metric_polynomial,
                              nongeneric_audit, structure_residuals, zero_curvature_residual)
from novikov.jets import Jet3, eq_residual

PARAMS = acceptance_params()


def _jet(u, ux, uxx):
    return Jet3(0.0, 0.0, u, ux, uxx, 0.0, 0.0, 0.0, 0.0)


def test_frame_hand_values():
    j = _jet(2.0, 1.0, 0.0)
    f = frame_coeffs(j, PSSParams(-2, 0.0, 1))
    assert (f.f11, f.f12, f.f21, f.f22, f.f31, f.f32) == (2.0, -6.0, -2.0, 0.0, 2.0, -6.0)
    assert frame_coeffs(j, PSSParams(1, 0.0, 1)).f12 == 6.0


def test_metric_hand_values():
    j = _jet(2.0, 1.0, 0.0)
    p = PSSParams(-2, 0.0, 1)
    assert metric(j, p) == (8.0, -12.0, 36.0)
    assert genericity(j, p) == -12.0


def test_params_validation():
    with pytest.raises(ValueError):
        PSSParams(2, 0.0, 1)
    with pytest.raises(ValueError):
        PSSParams(1, 0.0, 0)
    assert len(PARAMS) == 8 and len(set(PARAMS)) == 8


@pytest.mark.parametrize("p", PARAMS, ids=lambda p: p.label())
def test_residuals_are_multiples_of_equation(p, rng):
    j = random_jet(rng, 200)
    E = eq_residual(j)
    r1, r2, r3 = structure_residuals(j, p)
    assert np.allclose(r1, -E, atol=1e-12)
    assert np.allclose(r2, -p.mu * E, atol=1e-12)
    assert np.allclose(r3, -p.sigma * p.s * E, atol=1e-12)
    assert np.allclose(zero_curvature_residual(j, p), p.s * np.abs(E), atol=1e-12)


@pytest.mark.parametrize("p", PARAMS, ids=lambda p: p.label())
def test_genericity_closed_form(p, rng):
    j = random_jet(rng, 200)
    f12 = frame_coeffs(j, p).f12
    assert np.allclose(genericity(j, p), -p.sigma * p.m1 * p.s * f12, atol=1e-12)


@given(st.sampled_from(PARAMS), st.integers(0, 10**6))
def test_metric_polynomial_matches(p, seed):
    j = random_jet(np.random.default_rng(seed), 50, scale=3.0)
    for a, b in zip(metric(j, p), metric_polynomial(j, p)):
        assert np.allclose(a, b, rtol=1e-12, atol=1e-10)


@given(st.sampled_from(PARAMS), st.integers(0, 10**6))
def test_metric_determinant_is_w_squared(p, seed):
    j = random_jet(np.random.default_rng(seed), 50)
    g11, g12, g22 = metric(j, p)
    assert np.allclose(g11 * g22 - g12**2, genericity(j, p) ** 2, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("spec", sol.default_catalog(), ids=lambda s: s.kind)
def test_catalog_satisfies_structure_equations(spec):
    T, X = sol.sample_grid(spec, 41, 3)
    j = spec.jet(T, X)
    for p in PARAMS:
        assert max(np.max(np.abs(r)) for r in structure_residuals(j, p)) < 1e-9


def test_flat_metric_curvature_zero():
    t = np.linspace(0, 1, 41)
    x = np.linspace(0, 1, 41)
    E = np.ones((41, 41))
    K = brioschi(E, 0 * E, E, *(0 * E,) * 9)
    assert np.all(K == 0)
    del t, x


def test_hyperbolic_plane():
    # dx^2 + e^{2x} dt^2 has K = -1
    x = np.linspace(-1, 1, 5)
    e = np.exp(2 * x)
    z = 0 * x
    K = brioschi(1 + z, z, e, z, z, z, z, 2 * e, z, z, z, 4 * e)
    assert np.allclose(K, -1.0)


@pytest.mark.parametrize("p", PARAMS, ids=lambda p: p.label())
def test_curvature_of_exp_over_t(p):
    s = sol.ExpOverPower(1.0, 0.0)
    t, x = np.linspace(0.5, 2.0, 201), np.linspace(-1, 1, 201)
    if p.m1 == 1:
        # non-generic: no points survive the mask
        with pytest.raises(ValueError):
            gauss_curvature(metric_from_solution(s, p, t, x), w_min=0.1)
        return
    cf = gauss_curvature(metric_from_solution(s, p, t, x), w_min=0.1)
    assert cf.max_deviation() < 1e-4


def test_curvature_converges_fourth_order():
    s = sol.ExpOverPower(1.0, 0.0)
    p = PSSParams(-2, 1.0, -1)
    errs = []
    for n in (101, 201, 401):
        t, x = np.linspace(0.5, 2.0, n), np.linspace(-1, 1, n)
        errs.append(gauss_curvature(metric_from_solution(s, p, t, x), w_min=0.1).max_deviation())
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 3.5)


def test_curvature_nonuniform_grid_rejected():
    s = sol.ExpOverPower(1.0, 0.0)
    mf = metric_from_solution(s, PARAMS[0], np.array([0.5, 0.6, 0.8, 1.0, 1.1, 1.2, 1.3, 1.4]),
                              np.linspace(-1, 1, 21))
    with pytest.raises(ValueError):
        gauss_curvature(mf)


def test_curvature_all_degenerate_rejected():
    mf = metric_from_solution(sol.Constant(1.0), PARAMS[0], np.linspace(0, 1, 21),
                              np.linspace(-1, 1, 21))
    with pytest.raises(ValueError):
        gauss_curvature(mf)


def test_curvature_of_short_run(short_history):
    idx = np.arange(0, len(short_history), 5)
    mf = metric_from_history(short_history, PSSParams(-2, 0.0, 1), idx)
    cf = gauss_curvature(mf, w_min=0.1)
    assert cf.mask.sum() > 100
    assert cf.max_deviation() < 1e-2


@pytest.mark.parametrize("spec", sol.default_catalog(), ids=lambda s: s.kind)
def test_nongeneric_audit_consistent(spec):
    r = nongeneric_audit(spec)
    assert r.consistent, r.as_dict()


def test_expected_nongeneric_sets():
    assert expected_nongeneric(sol.Constant(1.0)) == {-2, 1}
    assert expected_nongeneric(sol.SqrtDecay()) == {-2}
    assert expected_nongeneric(sol.TimesExpX()) == {1}
    assert expected_nongeneric(sol.TravellingImplicit()) == set()


def test_audit_json(tmp_path):
    text = audit_json([nongeneric_audit(sol.ExpX(1.0))])
    assert '"consistent": true' in text


def test_metric_csv(tmp_path):
    mf = metric_from_solution(sol.ExpX(1.0), PARAMS[0], np.array([0.0, 1.0]), np.array([0.0]))
    mf.to_csv(tmp_path / "m.csv")
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert lines[0] == "t,x,g11,g12,g22,w" and len(lines) == 3
