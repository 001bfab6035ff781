import math

import pytest

import packbed


def small_reactor(re=50.0):
    cfg = packbed.CaseConfig.reactor(re)
    cfg.nx = 24
    cfg.ny = 12
    return cfg


def test_coefficients():
    assert abs(packbed.kappa(0.45) - 11.0 / 9.0) <= 1e-14
    assert packbed.alpha_beta(0.5) == pytest.approx((150.0, 1.75), abs=1e-14)
    assert packbed.porosity_at(5.0) == 1.0
    assert packbed.porosity_at(-5.0) == 1.0
    assert packbed.reynolds(2.0, 0.5, 0.1) == pytest.approx(10.0)


def test_domain_errors():
    with pytest.raises(ValueError):
        packbed.kappa(0.0)
    with pytest.raises(packbed.DomainError):
        packbed.porosity_at(5.5)


def test_config_validation():
    cfg = small_reactor()
    cfg.validate()
    cfg.nx = 0
    with pytest.raises(packbed.ConfigError) as info:
        cfg.validate()
    assert "nx" in str(info.value)
    assert cfg.issues() == ["nx must be >= 1"]


def test_solve_small_reactor():
    cfg = small_reactor()
    sol = packbed.solve(cfg)
    assert sol.converged
    assert sol.iterations == len(sol.residuals)
    assert sol.constraint_residual <= 1e-7
    u = sol.velocity_at(0.0, 0.0)
    assert u[0] == pytest.approx(1.0)
    profile = sol.profile(50.0, 21)
    assert len(profile) == 21
    ys = [p[0] for p in profile]
    assert ys[0] == -5.0 and ys[-1] == 5.0
    speeds = [p[1] for p in profile]
    assert speeds[0] == pytest.approx(0.0, abs=1e-12)
    assert speeds[-1] == pytest.approx(0.0, abs=1e-12)
    for a, b in zip(speeds, reversed(speeds)):
        assert a == pytest.approx(b, abs=1e-6)
    flux = sol.flux(cfg)
    assert abs(flux["net"]) <= 1e-3 * abs(flux["inflow"])


def test_skew_symmetry():
    violation, self_violation = packbed.check_skew_symmetry(5)
    assert violation <= 1e-11
    assert self_violation <= 1e-11
    control, _ = packbed.check_skew_symmetry(5, boundary_trace=True)
    assert control >= 1e-3


def test_convergence_study_reduces_error():
    rows = packbed.convergence_study(levels=2)
    assert len(rows) == 2
    assert rows[1][1] < rows[0][1]
    assert math.log2(rows[0][1] / rows[1][1]) > 2.0


def test_cli_entry_point(tmp_path, capsys):
    assert packbed.main(["verify", "nonsense"]) == 1
    cfg = tmp_path / "case.cfg"
    cfg.write_text(
        "length = 60\nhalf_width = 5\nnx = 12\nny = 8\nre = 50\n"
        "eps_inf = 0.45\nu_in = 1\nu_w = 0\n"
    )
    out = tmp_path / "run"
    assert packbed.main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "profile_x50.dat").exists()
    loaded = packbed.load_config(str(out / "config.txt"))
    assert loaded.nx == 12
