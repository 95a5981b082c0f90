import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logistic_threshold.grid import (StiffnessForm, apply_stiffness, build_grid, grid_for_radius,
                                     integrate, laplacian, sphere_area)


@pytest.mark.parametrize("dim, area", [(2, 2 * np.pi), (3, 4 * np.pi), (4, 2 * np.pi**2)])
def test_sphere_area(dim, area):
    assert sphere_area(dim) == pytest.approx(area, rel=1e-14)


def test_nodes_are_vertex_centred():
    g = build_grid(3, 2.0, 7)
    assert g.spacing == pytest.approx(0.25)
    np.testing.assert_allclose(g.nodes, 0.25 * np.arange(1, 8))
    with pytest.raises(ValueError):
        g.nodes[0] = 1.0


@pytest.mark.parametrize("args", [(2, 1.0, 10), (3, 0.0, 10), (3, -1.0, 10), (3, 1.0, 1),
                                  (3, np.inf, 10)])
def test_build_grid_rejects_bad_input(args):
    with pytest.raises(ValueError):
        build_grid(*args)


def test_grid_for_radius_keeps_spacing():
    for radius in (1.0, 2.0, 8.0):
        g = grid_for_radius(3, radius, 64)
        assert g.spacing == pytest.approx(1 / 64)
        assert g.node_count == 64 * radius - 1


def _quad_error(m, func, exact):
    g = build_grid(3, 1.0, m)
    return abs(integrate(g, func(g.nodes)) - exact)


def test_quadrature_first_order_for_constants():
    # mass in the last half-cell is not represented, so sum(w) is O(h)
    exact = 4 * np.pi / 3
    ratio = _quad_error(255, np.ones_like, exact) / _quad_error(511, np.ones_like, exact)
    assert ratio == pytest.approx(2.0, rel=0.02)


def test_quadrature_second_order_when_vanishing_at_boundary():
    # int_B (1 - r^2) dx = 4 pi (1/3 - 1/5)
    exact = 4 * np.pi * (1 / 3 - 1 / 5)
    ratio = (_quad_error(255, lambda r: 1 - r * r, exact)
             / _quad_error(511, lambda r: 1 - r * r, exact))
    assert ratio == pytest.approx(4.0, rel=0.05)


def test_integrate_checks_length():
    with pytest.raises(ValueError):
        integrate(build_grid(3, 1.0, 10), np.ones(9))


@pytest.mark.parametrize("dim", [3, 4, 5])
def test_stiffness_second_order_on_quadratic(dim):
    # -Delta (1 - r^2) = 2N; the W-scaled error is O(h^2) in sup norm
    errs = []
    for m in (127, 255, 511):
        g = build_grid(dim, 1.0, m)
        target = 2 * dim * g.quad_weights
        got = apply_stiffness(StiffnessForm(g), 1 - g.nodes**2)
        errs.append(np.max(np.abs(got - target)) / np.max(target))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.1)


def test_laplacian_of_quadratic():
    # relative truncation error is 1 / (12 i^2) at node i >= 2, 1/8 next to the origin
    g = build_grid(3, 1.0, 255)
    lap = laplacian(StiffnessForm(g), 1 - g.nodes**2)
    i = np.arange(1, g.node_count + 1)
    expected = 6.0 * (1 + 1 / (12 * i**2))
    expected[0] = 6.0 * (1 + 1 / 8)
    np.testing.assert_allclose(lap, expected, rtol=1e-10)


def test_boundary_value_enters_last_node():
    g = build_grid(3, 1.0, 63)
    form = StiffnessForm(g)
    u = 2.0 - g.nodes**2
    np.testing.assert_allclose(apply_stiffness(form, u, boundary_value=1.0)[-1],
                               6 * g.quad_weights[-1], rtol=1e-3)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 6), st.floats(0.1, 50.0), st.integers(2, 200), st.integers(0, 2**32 - 1))
def test_stiffness_is_symmetric_positive_definite(dim, radius, m, seed):
    g = build_grid(dim, radius, m)
    form = StiffnessForm(g)
    dense = form.to_dense()
    np.testing.assert_array_equal(dense, dense.T)
    u = np.random.default_rng(seed).standard_normal(m)
    energy = form.energy(u)
    assert energy > 0
    assert energy == pytest.approx(u @ dense @ u, rel=1e-10)
    assert energy == pytest.approx(u @ apply_stiffness(form, u), rel=1e-10)
    assert np.all(g.quad_weights > 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 6), st.integers(2, 100))
def test_off_diagonal_is_nonpositive(dim, m):
    # M-matrix structure behind the comparison principle
    dense = StiffnessForm(build_grid(dim, 1.0, m)).to_dense()
    off = dense - np.diag(np.diag(dense))
    assert np.all(off <= 0)
