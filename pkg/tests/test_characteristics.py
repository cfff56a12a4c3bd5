import numpy as np
import pytest

from novikov.characteristics import (CharacteristicExit, _lagrange4, evolve_characteristics,
                                     lower_bound, sign_preservation_report)
from novikov.jets import FieldHistory, SpaceGrid


def frozen_history(grid, values, t_end=0.5, dt=0.01):
    times = np.arange(0.0, t_end + dt / 2, dt)
    return FieldHistory(grid, times, np.tile(values, (len(times), 1)))


def test_lagrange_exact_on_cubics():
    x = np.linspace(-1, 1, 21)
    row = x**3 - 2 * x
    q = np.random.default_rng(0).uniform(-1, 1, 50)
    assert np.allclose(_lagrange4(row, -1.0, 0.1, q), q**3 - 2 * q, atol=1e-13)


def test_constant_field_translation():
    g = SpaceGrid(10.0, 256)
    h = frozen_history(g, np.full(g.n, 0.5))
    cm = evolve_characteristics(h, np.linspace(-5, 5, 11))
    assert np.allclose(cm.q, cm.seeds[None, :] - cm.times[:, None], atol=1e-12)
    assert np.allclose(cm.qx, 1.0)


def test_variational_matches_exp_formula(short_history):
    seeds = np.linspace(-8, 8, 17)
    cm = evolve_characteristics(short_history, seeds)
    assert np.max(np.abs(cm.qx - cm.qx_exp_formula())) < 1e-5
    assert cm.monotone()


def test_sign_preservation_short_run(short_history):
    cm = evolve_characteristics(short_history, np.linspace(-10, 10, 41))
    rep = sign_preservation_report(short_history, cm)
    assert rep.passed(), rep.as_dict()
    assert rep.min_m_along >= -1e-6


def test_lower_bound_at_start(short_history):
    cm = evolve_characteristics(short_history, np.linspace(-3, 3, 7))
    assert np.allclose(lower_bound(cm)[0], cm.m_along[0])


def test_exit_detected():
    g = SpaceGrid(5.0, 128)
    h = frozen_history(g, np.full(g.n, 3.0), t_end=1.0)
    with pytest.raises(CharacteristicExit):
        evolve_characteristics(h, np.array([-3.0]))
    with pytest.raises(CharacteristicExit):
        evolve_characteristics(h, np.array([5.0]))


def test_sparse_snapshots_rejected():
    g = SpaceGrid(5.0, 128)
    h = frozen_history(g, np.zeros(g.n), dt=0.1)
    with pytest.raises(ValueError):
        evolve_characteristics(h, np.array([0.0]))


def test_charmap_csv(tmp_path, short_history):
    cm = evolve_characteristics(short_history, np.array([0.0, 1.0]))
    cm.to_csv(tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "t,x_seed,q,qx,m_along"
    assert len(lines) == 1 + 2 * len(short_history)


def test_variational_matches_seed_differences(short_history):
    d = 1e-3
    base = np.linspace(-6, 6, 13)
    seeds = np.sort(np.concatenate([base - d, base, base + d]))
    cm = evolve_characteristics(short_history, seeds)
    q = cm.q.reshape(len(cm.times), 13, 3)
    fd = (q[:, :, 2] - q[:, :, 0]) / (2 * d)
    assert np.max(np.abs(fd - cm.qx.reshape(len(cm.times), 13, 3)[:, :, 1])) < 1e-3
