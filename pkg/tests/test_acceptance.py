"""Acceptance criteria A1-A10; one PASS/FAIL line per criterion is printed at the end.

The Lambda estimate uses the default curve (256 nodes per unit radius); the
nonlinear solves run at 64 nodes per unit.
"""

import time

import numpy as np
import pytest
from conftest import record_criterion
from oracles import EXACT_BIG_LAMBDA, PI_SQUARED, uniform_ball_potential

from logistic_threshold import (Extinct, SolveOptions, bifurcation_sweep, boundary_flux,
                                build_grid, constant_potential, dense_oracle, energy_identity,
                                estimate_big_lambda, grid_for_radius, lambda_curve,
                                minimal_maximal_gap, monotone_solve_ball, newtonian_potential,
                                principal_weighted, radial_newton_potential, rational_decay)
from logistic_threshold.logistic import MONOTONE_STATS

ONE = constant_potential(1.0)
SOLVE_SCHEDULE = (4, 8, 16, 32)
SWEEP_FACTORS = (0.5, 0.75, 1.25, 1.5)


@pytest.fixture(scope="module")
def estimate(decaying_potential):
    return estimate_big_lambda(lambda_curve(decaying_potential))


@pytest.fixture(scope="module")
def sweep(decaying_potential, fisher, estimate):
    start = time.perf_counter()
    table = bifurcation_sweep(decaying_potential, fisher,
                              [c * estimate.value for c in SWEEP_FACTORS], SOLVE_SCHEDULE,
                              SolveOptions())
    return table, time.perf_counter() - start


@pytest.fixture(scope="module")
def entire(sweep):
    # lambda = 1.5 Lambda-hat
    return sweep[0].results[-1]


@pytest.fixture(scope="module")
def unit_ball_solution(fisher):
    g = build_grid(3, 1.0, 255)
    lam = 2 * principal_weighted(g, ONE).lambda1
    return monotone_solve_ball(g, ONE, fisher, lam)


def test_a1_eigenvalue_oracle():
    start = time.perf_counter()
    fine = principal_weighted(build_grid(3, 1.0, 2048), ONE).lambda1
    elapsed = time.perf_counter() - start
    coarse = principal_weighted(build_grid(3, 1.0, 1024), ONE).lambda1
    ratio = (coarse - PI_SQUARED) / (fine - PI_SQUARED)
    ok = abs(fine - PI_SQUARED) <= 1e-3 and 3.6 <= ratio <= 4.4 and elapsed < 1.0
    record_criterion("A1", ok, f"|err(2048)|={abs(fine - PI_SQUARED):.3e}, "
                               f"err(1024)/err(2048)={ratio:.3f}, {elapsed:.3f}s")
    assert abs(fine - PI_SQUARED) <= 1e-3
    assert 3.6 <= ratio <= 4.4
    assert elapsed < 1.0


def test_a2_scaling_law():
    curve = lambda_curve(ONE)
    scaled = curve.lambda1[:3] * curve.radii[:3] ** 2 / PI_SQUARED - 1
    est = estimate_big_lambda(curve)
    ok = np.all(np.abs(scaled) <= 1e-3) and est.high < 0.05
    record_criterion("A2", ok, f"max rel err R<=4: {np.max(np.abs(scaled)):.2e}, "
                               f"Lambda_high={est.high:.3e}")
    assert np.all(np.abs(scaled) <= 1e-3)
    assert est.high < 0.05


def test_a3_dense_oracle_equivalence():
    rng = np.random.default_rng(3)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        a = rng.uniform(0.5, 2.0)
        p = rng.uniform(1.5, 3.0)
        v = rational_decay(a, p, b=rng.uniform(0.1, 0.9) * a, q=rng.uniform(0.5, p - 0.5))
        g = build_grid(3, rng.uniform(2.0, 16.0), 128)
        it = principal_weighted(g, v, tol=1e-12).lambda1
        dense = dense_oracle(g, v).eigenvalues[0]
        worst = max(worst, abs(it - dense) / dense)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 10.0
    record_criterion("A3", ok, f"max rel diff {worst:.2e} over 20 potentials, {elapsed:.2f}s")
    assert worst <= 1e-10
    assert elapsed < 10.0


def test_a4_positive_threshold(decaying_potential, estimate):
    doubled = estimate_big_lambda(lambda_curve(decaying_potential,
                                               (1, 2, 4, 8, 16, 32, 64, 128)))
    shift = abs(doubled.value - estimate.value)
    rel_width = estimate.width / estimate.value
    ok = estimate.low > 0 and rel_width < 0.05 and shift < estimate.width
    record_criterion("A4", ok, f"Lambda={estimate.value:.5f} in [{estimate.low:.5f}, "
                               f"{estimate.high:.5f}] (width {100 * rel_width:.2f}%), "
                               f"shift on doubling {shift:.2e}, exact {EXACT_BIG_LAMBDA}")
    assert estimate.low > 0
    assert rel_width < 0.05
    assert shift < estimate.width
    assert estimate.low <= EXACT_BIG_LAMBDA <= estimate.high


def test_a5_dichotomy(sweep, estimate):
    table, elapsed = sweep
    flags = [r.exists for r in table.rows]
    sups = [r.sup_norm for r in table.rows if r.exists]
    pad = 0.05 * estimate.width
    inside = estimate.low - pad <= table.lambda_emp <= estimate.high + pad
    ok = (flags == [False, False, True, True] and min(sups) > 1e-4 and inside
          and elapsed < 120.0)
    record_criterion("A5", ok, f"exists={flags}, sup norms={[f'{s:.3e}' for s in sups]}, "
                               f"Lambda_emp={table.lambda_emp:.5f}, {elapsed:.1f}s")
    assert flags == [False, False, True, True]
    assert min(sups) > 1e-4
    assert inside
    assert elapsed < 120.0


def test_a6_uniqueness(decaying_potential, fisher, entire, unit_ball_solution):
    gap_entire = minimal_maximal_gap(entire.final.grid, decaying_potential, fisher, entire.lam)
    g = unit_ball_solution.grid
    gap_ball = minimal_maximal_gap(g, ONE, fisher, unit_ball_solution.lam)
    ok = gap_entire <= 1e-6 and gap_ball <= 1e-6
    record_criterion("A6", ok, f"gap on B_{entire.final.grid.radius:g} {gap_entire:.2e}, "
                               f"unit ball {gap_ball:.2e}")
    assert gap_entire <= 1e-6
    assert gap_ball <= 1e-6


def test_a7_monotonicity(sweep):
    nested = True
    for res in sweep[0].results:
        if isinstance(res, Extinct):
            continue
        for small, big in zip(res.profiles, res.profiles[1:]):
            nested &= bool(np.all(big.values[: small.values.size] >= small.values))
    steps, bad = MONOTONE_STATS["steps_checked"], MONOTONE_STATS["violations"]
    ok = nested and steps > 0 and bad == 0
    record_criterion("A7", ok, f"{steps} iteration steps checked so far, {bad} violations; "
                               f"stage profiles nested: {nested}")
    assert nested
    assert steps > 0 and bad == 0


def test_a8_supersolution_bound(entire):
    record_criterion("A8", entire.supersolution_ok,
                     f"u <= n*/(1+r^2) with n*={entire.supersolution_constant:g}: "
                     f"{entire.supersolution_ok}")
    assert entire.supersolution_ok


def test_a8_decay_slope(entire):
    decay = entire.decay
    ok = decay.passed
    record_criterion("A8", ok, f"tail slope {decay.slope:.3f} on r in [{decay.window[0]:.1f}, "
                               f"{decay.window[1]:.1f}], target {decay.target:g} +- 0.1 "
                               f"(upper bound slope <= {decay.target + 0.1:g}: {decay.bound_ok})")
    assert abs(decay.slope - decay.target) <= 0.1


def test_a9_newtonian_identity(decaying_potential, entire):
    g = build_grid(3, 1.0, 4096)
    v, vr = radial_newton_potential(g, np.ones(g.node_count), boundary_density=1.0)
    closed = max(float(np.max(np.abs(v - uniform_ball_potential(g.nodes)))),
                 abs(vr - uniform_ball_potential(1.0)))
    residuals = [newtonian_potential(p, decaying_potential).residual for p in entire.profiles]
    ok = closed <= 1e-6 and max(residuals) <= 1e-3
    record_criterion("A9", ok, f"uniform ball max err {closed:.2e}, "
                               f"solution residuals {[f'{r:.1e}' for r in residuals]}")
    assert closed <= 1e-6
    assert max(residuals) <= 1e-3


def test_a10_flux_and_energy(decaying_potential, fisher, entire, unit_ball_solution):
    gaps = [energy_identity(unit_ball_solution, ONE, fisher).relative_gap]
    gaps += [energy_identity(p, decaying_potential, fisher).relative_gap
             for p in entire.profiles]
    profiles = entire.profiles[-3:]
    radii = [p.grid.radius for p in profiles]
    fluxes = [abs(boundary_flux(p)) for p in profiles]
    decreasing = radii[1] == 2 * radii[0] and radii[2] == 4 * radii[0] and \
        fluxes[0] > fluxes[1] > fluxes[2]
    ok = max(gaps) <= 1e-6 and decreasing
    record_criterion("A10", ok, f"max energy-identity gap {max(gaps):.1e}; |flux| at R="
                                f"{[f'{r:g}' for r in radii]}: {[f'{x:.2e}' for x in fluxes]}")
    assert max(gaps) <= 1e-6
    assert decreasing
