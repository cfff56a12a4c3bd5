import json

import pytest

from novikov.cli import EXIT_BLOWUP, EXIT_CONFIG, EXIT_FAIL, EXIT_OK, main

SMALL = {"half_length": 10.0, "n": 256, "dt": 5e-3, "t_end": 0.05}


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_verify_exact(tmp_path):
    assert main(["verify-exact", "--out", str(tmp_path)]) == EXIT_OK
    data = json.loads((tmp_path / "verify_exact.json").read_text())
    assert data["all_pass"] and len(data["reports"]) == 13


def test_verify_exact_impossible_tol(tmp_path):
    cfg = write(tmp_path, {"catalog": [{"kind": "TravellingImplicit", "c": 1.0, "C1": 1.0,
                                        "theta0": 2.0}]})
    assert main(["verify-exact", "--config", cfg, "--tol", "0", "--out", str(tmp_path)]) == EXIT_FAIL


def test_simulate_deterministic(tmp_path):
    cfg = write(tmp_path, SMALL)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", cfg, "--out", str(a)]) == EXIT_OK
    assert main(["simulate", "--config", cfg, "--out", str(b)]) == EXIT_OK
    assert (a / "history.csv").read_bytes() == (b / "history.csv").read_bytes()


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("NOVIKOV_OUT", str(tmp_path / "env"))
    assert main(["algebra", "--vector", "5", "3", "1"]) == EXIT_OK
    data = json.loads((tmp_path / "env" / "algebra.json").read_text())
    assert data["representative"]["vec"] == [5.0, 0.0, 1.0]


def test_unknown_key_is_config_error(tmp_path):
    cfg = write(tmp_path, {"half_length": 10.0, "bogus": 1})
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == EXIT_CONFIG


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["simulate", "--config", str(p), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_missing_config_file(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "none.json"),
                 "--out", str(tmp_path)]) == EXIT_CONFIG


def test_cfl_violation(tmp_path):
    cfg = write(tmp_path, dict(SMALL, dt=1.0, t_end=2.0))
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == EXIT_CONFIG


def test_blowup_exit(tmp_path):
    cfg = write(tmp_path, dict(SMALL, t_end=0.2, blowup_threshold=0.6,
                               initial={"kind": "gaussian", "amplitude": 3.0}))
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == EXIT_BLOWUP


def test_conserve(tmp_path):
    cfg = write(tmp_path, {"simulation": SMALL, "tol": 1e-2})
    assert main(["conserve", "--config", cfg, "--out", str(tmp_path)]) in (EXIT_OK, EXIT_FAIL)
    assert (tmp_path / "drift.csv").exists()
    data = json.loads((tmp_path / "conserve.json").read_text())
    assert set(data["quantities"]) == {"H1", "H2", "H3[f=1]", "H3[f=exp(1t)]"}


def test_geometry_closed_form(tmp_path):
    cfg = write(tmp_path, {"solution": {"kind": "ExpOverPower", "a": 1.0, "alpha": 0.0},
                           "points": 101})
    assert main(["geometry", "--config", cfg, "--out", str(tmp_path)]) == EXIT_OK
    for name in ("metric.csv", "curvature.csv", "geometry.json"):
        assert (tmp_path / name).exists()


def test_continuation(tmp_path):
    cfg = write(tmp_path, {"simulation": SMALL})
    assert main(["continuation", "--config", cfg, "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "continuation.json").exists()


def test_algebra_table(tmp_path, capsys):
    assert main(["algebra", "--table", "--out", str(tmp_path)]) == EXIT_OK
    assert "e^eps X2" in capsys.readouterr().out


def test_unknown_criterion(tmp_path):
    assert main(["acceptance", "--criterion", "99", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_acceptance_single(tmp_path):
    assert main(["acceptance", "--criterion", "1", "--out", str(tmp_path)]) == EXIT_OK
    assert json.loads((tmp_path / "criterion_01.json").read_text())["pass"]


def test_bad_subcommand():
    with pytest.raises(SystemExit):
        main(["nope"])


def test_immediate_blowup_message(tmp_path, capsys):
    cfg = write(tmp_path, dict(SMALL, blowup_threshold=0.1,
                               initial={"kind": "gaussian", "amplitude": 3.0}))
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == EXIT_BLOWUP
    assert "blow-up at t=0" in capsys.readouterr().err
