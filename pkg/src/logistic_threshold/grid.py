"""Vertex-centred radial grid on the ball B_R and the flux-form radial Laplacian.

Nodes sit at r_i = i h, i = 1..M, with h = R / (M + 1).  The node M + 1 lies on
the sphere |x| = R and carries the Dirichlet value 0; regularity at the origin
is imposed by the reflection u_0 = u_1 (no flux through r = h / 2).

All matrices are symmetric tridiagonal and stored in LAPACK lower-banded
layout: row 0 is the diagonal, row 1 the sub-diagonal (last entry unused).
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import gamma


def sphere_area(dim):
    """Surface area of the unit sphere in R^dim."""
    return 2.0 * np.pi ** (dim / 2.0) / gamma(dim / 2.0)


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid for radially symmetric functions on B_R.

    Attributes:
        dim: space dimension N (>= 3).
        radius: ball radius R.
        node_count: number of interior nodes M.
    """

    dim: int
    radius: float
    node_count: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    quad_weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        h = self.spacing
        nodes = h * np.arange(1, self.node_count + 1)
        weights = self.sphere_area * nodes ** (self.dim - 1) * h
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "quad_weights", weights)

    @property
    def spacing(self):
        return self.radius / (self.node_count + 1)

    @property
    def sphere_area(self):
        return sphere_area(self.dim)

    @property
    def ball_volume(self):
        return self.sphere_area * self.radius**self.dim / self.dim

    def extended(self, radius):
        """Grid on a larger ball with the same spacing (nodes are shared)."""
        count = int(round(radius / self.spacing)) - 1
        return build_grid(self.dim, radius, count)


@dataclass(frozen=True)
class StiffnessForm:
    """The form a(u, v) = sum_i c_i (u_{i+1} - u_i)(v_{i+1} - v_i), u_{M+1} = 0.

    ``face_coeffs[i-1]`` is c_i = omega_N r_{i+1/2}^{N-1} / h for the face
    between nodes i and i+1.
    """

    grid: RadialGrid

    @cached_property
    def face_coeffs(self):
        g = self.grid
        h = g.spacing
        faces = h * (np.arange(1, g.node_count + 1) + 0.5)
        return g.sphere_area * faces ** (g.dim - 1) / h

    @cached_property
    def banded(self):
        """Stiffness matrix in lower-banded storage, shape (2, M)."""
        c = self.face_coeffs
        ab = np.zeros((2, c.size))
        ab[0] = c
        ab[0, 1:] += c[:-1]
        ab[1, :-1] = -c[:-1]
        ab.flags.writeable = False
        return ab

    def to_dense(self):
        ab = self.banded
        return np.diag(ab[0]) + np.diag(ab[1, :-1], -1) + np.diag(ab[1, :-1], 1)

    def energy(self, u, v=None):
        """Bilinear form a(u, v); a(u, u) when ``v`` is omitted."""
        u = np.asarray(u, dtype=float)
        v = u if v is None else np.asarray(v, dtype=float)
        du = np.diff(u, append=0.0)
        dv = np.diff(v, append=0.0)
        return float(np.sum(self.face_coeffs * du * dv))


def build_grid(dim, radius, node_count):
    """Build the radial grid on B_radius in dimension ``dim``.

    Raises:
        ValueError: if dim < 3, radius is not positive and finite, or node_count < 2.
    """
    if int(dim) != dim or dim < 3:
        raise ValueError(f"dimension must be an integer >= 3, got {dim}")
    if not (radius > 0 and np.isfinite(radius)):
        raise ValueError(f"radius must be positive and finite, got {radius}")
    if int(node_count) != node_count or node_count < 2:
        raise ValueError(f"node_count must be an integer >= 2, got {node_count}")
    return RadialGrid(int(dim), float(radius), int(node_count))


def grid_for_radius(dim, radius, nodes_per_unit):
    """Grid with spacing 1 / nodes_per_unit, so balls of different radii share nodes."""
    count = int(round(radius * nodes_per_unit)) - 1
    return build_grid(dim, radius, count)


def _check_length(grid, values):
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.node_count,):
        raise ValueError(
            f"expected {grid.node_count} nodal values, got shape {values.shape}"
        )
    return values


def integrate(grid, values):
    """Quadrature of a radial function over B_R: sum_i w_i values_i."""
    values = _check_length(grid, values)
    return float(grid.quad_weights @ values)


def apply_stiffness(form, values, boundary_value=0.0):
    """Matrix-vector product with the stiffness matrix, i.e. W (-Delta_h u).

    ``boundary_value`` is the ghost value at r = R (0 for the Dirichlet problem).
    """
    u = _check_length(form.grid, values)
    c = form.face_coeffs
    flux = c * (u - np.append(u[1:], boundary_value))
    out = flux.copy()
    out[1:] -= flux[:-1]
    return out


def laplacian(form, values, boundary_value=0.0):
    """Nodal values of -Delta_h u (stiffness action divided by the weights)."""
    return apply_stiffness(form, values, boundary_value) / form.grid.quad_weights
