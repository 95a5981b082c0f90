import numpy as np
import pytest

from logistic_threshold.diagnostics import (boundary_flux, decay_exponent, energy_identity,
                                            newton_comparison, newton_residual,
                                            newtonian_potential, norms, profile_from_values,
                                            radial_newton_potential)
from logistic_threshold.eigen import principal_weighted
from logistic_threshold.grid import build_grid
from logistic_threshold.logistic import Extinct, monotone_solve_ball
from logistic_threshold.problem import constant_potential, rational_decay

ONE = constant_potential(1.0)


def _profile(dim, radius, m, func, lam=1.0):
    g = build_grid(dim, radius, m)
    return profile_from_values(g, func(g.nodes), lam=lam)


def test_synthetic_inverse_r_has_slope_minus_one():
    rep = decay_exponent(_profile(3, 20.0, 400, lambda r: 1 / r))
    assert rep.slope == pytest.approx(-1.0, abs=1e-12)
    assert rep.passed and rep.bound_ok
    assert rep.window[0] >= 2 / 3 * 20 and rep.window[1] <= 0.95 * 20


def test_faster_decay_satisfies_bound_but_not_rate():
    rep = decay_exponent(_profile(3, 20.0, 400, lambda r: r**-2.0))
    assert rep.slope == pytest.approx(-2.0, abs=1e-12)
    assert not rep.passed and rep.bound_ok
    assert rep.decay_constant == pytest.approx(1 / (20 / 401))


def test_window_is_configurable():
    prof = _profile(4, 10.0, 200, lambda r: r**-2.0 * (1 + np.exp(-r)))
    a = decay_exponent(prof, window=(0.5, 0.9)).slope
    b = decay_exponent(prof, window=(0.6, 0.95)).slope
    assert abs(a - b) < 0.05
    assert a == pytest.approx(-2.0, abs=0.01)


def test_decay_refuses_extinct():
    with pytest.raises(ValueError):
        decay_exponent(Extinct(1.0, "gone"))
    with pytest.raises(ValueError):
        decay_exponent(_profile(3, 5.0, 50, np.zeros_like))


def test_norms_of_zero_profile(decaying_potential, fisher):
    rep = norms(_profile(3, 8.0, 100, np.zeros_like), decaying_potential, fisher)
    assert (rep.l2_norm, rep.energy, rep.int_vplus_u, rep.int_vminus_u, rep.int_f) == (0,) * 5
    assert all(v == 1.0 for v in rep.ratios.values())


def test_l2_norm_of_lorentzian(fisher):
    # int_R3 (1 + r^2)^-2 dx = pi^2; the tail beyond R contributes ~4 pi / R
    radius = 400.0
    rep = norms(_profile(3, radius, 40000, lambda r: 1 / (1 + r * r)), ONE, fisher)
    assert rep.l2_norm**2 == pytest.approx(np.pi**2 - 4 * np.pi / radius, rel=1e-4)
    assert rep.ratios["l2_norm"] == pytest.approx(1.0, abs=2e-3)


def test_norm_split_by_sign():
    v = rational_decay(1.0, 2.0, b=2.0, q=3.0)  # negative near 0, positive further out
    prof = _profile(3, 6.0, 600, lambda r: np.exp(-r))
    rep = norms(prof, v, lambda u: u * u)
    g = prof.grid
    vals = v(g.nodes) * prof.values
    assert rep.int_vplus_u - rep.int_vminus_u == pytest.approx(g.quad_weights @ vals)
    assert rep.int_vminus_u > 0 and rep.int_vplus_u > 0


def test_flux_of_fundamental_solution():
    prof = _profile(3, 10.0, 10000, lambda r: 1 / r)
    r = prof.grid.nodes[np.argmin(np.abs(prof.grid.nodes - 9.5))]
    assert boundary_flux(prof) == pytest.approx(-4 * np.pi / r, rel=1e-3)


def test_flux_of_constant_is_zero():
    assert boundary_flux(_profile(3, 4.0, 100, np.ones_like)) == 0.0


def test_flux_needs_three_nodes():
    with pytest.raises(ValueError):
        boundary_flux(_profile(3, 1.0, 2, np.ones_like))


@pytest.mark.parametrize("m", [1024, 4096])
def test_uniform_ball_potential(m):
    g = build_grid(3, 1.0, m)
    v, vr = radial_newton_potential(g, np.ones(m), boundary_density=1.0)
    tol = 1e-6 if m == 4096 else 1e-5
    np.testing.assert_allclose(v, (3 - g.nodes**2) / 6, atol=tol)
    assert vr == pytest.approx(1 / 3, abs=tol)


def test_zero_density_gives_zero_potential():
    g = build_grid(3, 2.0, 100)
    v, vr = radial_newton_potential(g, np.zeros(100))
    assert np.all(v == 0) and vr == 0
    assert newton_residual(g, v, vr, np.zeros(100)) == 0


def test_newton_potential_agrees_with_stiffness():
    g = build_grid(4, 3.0, 600)
    rho = np.exp(-g.nodes**2)
    v, vr = radial_newton_potential(g, rho, np.exp(-9.0))
    assert newton_residual(g, v, vr, rho) < 1e-3


@pytest.fixture(scope="module")
def ball_solution(fisher):
    g = build_grid(3, 1.0, 511)
    lam = 2 * principal_weighted(g, ONE).lambda1
    return monotone_solve_ball(g, ONE, fisher, lam)


def test_energy_identity_on_ball(ball_solution, fisher):
    ident = energy_identity(ball_solution, ONE, fisher)
    assert ident.relative_gap < 1e-6
    assert ident.boundary > 0


def test_newton_on_ball_solution(ball_solution):
    pot = newtonian_potential(ball_solution, ONE)
    assert pot.residual < 1e-3
    assert pot.tail_bound is None  # V = 1 declares no decay
    comp = newton_comparison(ball_solution, ONE)
    assert comp.passed and comp.constant > ball_solution.lam


def test_tail_bound_reported(decaying_potential):
    prof = _profile(3, 10.0, 200, lambda r: 1 / (1 + r * r))
    pot = newtonian_potential(prof, decaying_potential)
    # sup u * A R^-alpha / (alpha (N - 2))
    assert pot.tail_bound == pytest.approx(prof.values.max() * 10.0**-2 / 2)


def test_reports_serialise(decaying_potential, fisher):
    prof = _profile(3, 10.0, 200, lambda r: 1 / (1 + r))
    assert set(decay_exponent(prof).to_dict()) >= {"slope", "window", "target", "passed"}
    assert "ratios" in norms(prof, decaying_potential, fisher).to_dict()


def test_profile_length_checked():
    with pytest.raises(ValueError):
        profile_from_values(build_grid(3, 1.0, 10), np.ones(9))
