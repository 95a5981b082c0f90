"""Checks on computed profiles: tail decay, integrability, boundary flux,
and the Newtonian potential of V+ u.
"""

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .grid import StiffnessForm, apply_stiffness
from .logistic import Extinct, SolutionProfile

DEFAULT_WINDOW = (2.0 / 3.0, 0.95)


def profile_from_values(grid, values, lam=float("nan"), bound=float("inf")):
    """Wrap raw nodal values as a SolutionProfile (for synthetic or loaded data)."""
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.node_count,):
        raise ValueError(f"expected {grid.node_count} values, got shape {values.shape}")
    return SolutionProfile(grid, lam, values, "external", 0, float("nan"), float("nan"), bound)


def _window_mask(grid, window):
    lo, hi = window
    r = grid.nodes
    return (r >= lo * grid.radius) & (r <= hi * grid.radius)


@dataclass
class DecayReport:
    slope: float
    window: tuple
    target: float
    passed: bool
    bound_ok: bool
    decay_constant: float
    tolerance: float = 0.1

    def to_dict(self):
        return asdict(self)


def decay_exponent(profile, window=DEFAULT_WINDOW, tolerance=0.1):
    """Least-squares slope of log u against log r over a window of the domain.

    ``window`` is given as fractions of the ball radius.  ``passed`` compares
    the slope with 2 - N; ``bound_ok`` only asks that u decays at least that
    fast.  ``decay_constant`` is max u r^(N-2) over the whole grid.

    Raises:
        ValueError: the profile is extinct or not strictly positive on the window.
    """
    if isinstance(profile, Extinct):
        raise ValueError("extinct profile has no decay rate")
    grid = profile.grid
    mask = _window_mask(grid, window)
    if mask.sum() < 2:
        raise ValueError("fit window holds fewer than two nodes")
    u = profile.values[mask]
    if np.any(u <= 0.0):
        raise ValueError("profile is not strictly positive on the fit window")
    r = grid.nodes[mask]
    slope = float(np.polyfit(np.log(r), np.log(u), 1)[0])
    target = 2.0 - grid.dim
    scaled = float(np.max(profile.values * grid.nodes ** (grid.dim - 2)))
    return DecayReport(slope, (float(r[0]), float(r[-1])), target,
                       abs(slope - target) <= tolerance, slope <= target + tolerance,
                       scaled, tolerance)


@dataclass
class NormReport:
    l2_norm: float
    energy: float
    int_vplus_u: float
    int_vminus_u: float
    int_f: float
    ratios: dict

    def to_dict(self):
        return asdict(self)


def _quantities(grid, form, u, vplus, vminus, fu, count):
    w = grid.quad_weights[:count]
    uu = u[:count]
    if count == grid.node_count:
        energy = form.energy(u)
    else:
        du = np.diff(uu)
        energy = float(np.sum(form.face_coeffs[: count - 1] * du * du))
    return {
        "l2_norm": float(np.sqrt(w @ (uu * uu))),
        "energy": energy,
        "int_vplus_u": float(w @ (vplus[:count] * uu)),
        "int_vminus_u": float(w @ (vminus[:count] * uu)),
        "int_f": float(w @ fu[:count]),
    }


def norms(profile, potential, f):
    """L2 norm, gradient energy a(u, u) and the L1 integrals of V+ u, V- u, f(u).

    ``ratios`` compares each quantity on B_R with the same profile cut at R/2;
    ratios near 1 mean the quantity has converged with the radius.
    """
    grid = profile.grid
    u = profile.values
    r = grid.nodes
    form = StiffnessForm(grid)
    vplus, vminus = potential.positive_part(r), potential.negative_part(r)
    fu = f(u)
    full = _quantities(grid, form, u, vplus, vminus, fu, grid.node_count)
    half = _quantities(grid, form, u, vplus, vminus, fu, int(np.sum(r <= 0.5 * grid.radius)))
    ratios = {}
    for key, value in full.items():
        if half[key] == 0.0:
            ratios[key] = 1.0 if value == 0.0 else float("inf")
        else:
            ratios[key] = value / half[key]
    return NormReport(ratios=ratios, **full)


def boundary_flux(profile, at=DEFAULT_WINDOW[1]):
    """omega_N r^(N-1) u(r) u'(r) at the node nearest ``at * R`` (backward difference)."""
    grid = profile.grid
    if grid.node_count < 3:
        raise ValueError("need at least three nodes")
    i = int(np.clip(np.argmin(np.abs(grid.nodes - at * grid.radius)), 1, grid.node_count - 1))
    u = profile.values
    du = (u[i] - u[i - 1]) / grid.spacing
    return float(grid.sphere_area * grid.nodes[i] ** (grid.dim - 1) * u[i] * du)


@dataclass
class EnergyIdentity:
    gradient: float
    boundary: float
    rhs: float
    relative_gap: float


def energy_identity(profile, potential, f):
    """Discrete form of  int |grad u|^2 - int_{dB} u du/dnu = lam int (V u^2 - f(u) u).

    The gradient term runs over faces inside the ball; the face at the
    boundary supplies the boundary term.
    """
    grid = profile.grid
    u = profile.values
    c = StiffnessForm(grid).face_coeffs
    du = np.diff(u)
    gradient = float(np.sum(c[:-1] * du * du))
    boundary = float(c[-1] * u[-1] * u[-1])
    v = potential(grid.nodes)
    rhs = profile.lam * float(grid.quad_weights @ (v * u * u - f(u) * u))
    scale = max(abs(gradient + boundary), abs(rhs), 1e-300)
    return EnergyIdentity(gradient, boundary, rhs, abs(gradient + boundary - rhs) / scale)


@dataclass
class NewtonianPotential:
    grid: object
    values: np.ndarray
    boundary_value: float
    density: np.ndarray
    residual: float
    tail_bound: Optional[float] = None


def radial_newton_potential(grid, density, boundary_density=0.0):
    """v(r) = [r^(2-N) int_0^r rho s^(N-1) ds + int_r^R rho s ds] / (N - 2).

    Integrals use the trapezoid rule on [0, h, ..., M h, R]; ``boundary_density``
    is rho(R).  Returns nodal values and v(R).
    """
    n = grid.dim
    rho = np.asarray(density, dtype=float)
    s = np.concatenate(([0.0], grid.nodes, [grid.radius]))
    dens = np.concatenate(([rho[0]], rho, [boundary_density]))
    inner = cumulative_trapezoid(dens * s ** (n - 1), s, initial=0.0)
    outer_from_zero = cumulative_trapezoid(dens * s, s, initial=0.0)
    outer = outer_from_zero[-1] - outer_from_zero
    v = np.empty_like(s)
    v[1:] = (s[1:] ** (2 - n) * inner[1:] + outer[1:]) / (n - 2)
    return v[1:-1], float(v[-1])


def newtonian_potential(profile, potential):
    """Newtonian potential of rho = V+ u on B_R, with its stiffness cross-check.

    ``residual`` is ||A v - W rho|| / ||W rho|| with v(R) as the boundary
    value, comparing the quadrature route against the finite-difference
    operator.  ``tail_bound`` bounds what the mass outside B_R would add,
    using the declared decay constants of V (None if undeclared).
    """
    grid = profile.grid
    rho = potential.positive_part(grid.nodes) * profile.values
    values, vr = radial_newton_potential(grid, rho)
    residual = newton_residual(grid, values, vr, rho)
    tail = None
    if potential.decay_bound is not None:
        amp, alpha = potential.decay_bound
        sup_u = float(np.max(np.abs(profile.values))) if profile.values.size else 0.0
        tail = sup_u * amp * grid.radius**-alpha / (alpha * (grid.dim - 2))
    return NewtonianPotential(grid, values, vr, rho, residual, tail)


def newton_residual(grid, values, boundary_value, density):
    target = grid.quad_weights * density
    got = apply_stiffness(StiffnessForm(grid), values, boundary_value)
    scale = np.linalg.norm(target)
    if scale == 0.0:
        return float(np.linalg.norm(got))
    return float(np.linalg.norm(got - target) / scale)


@dataclass
class NewtonComparison:
    constant: float
    min_margin: float
    passed: bool


def newton_comparison(profile, potential, window=DEFAULT_WINDOW):
    """Check C v - u > 0 at every node for C = 2 lam (1 + ||u|| / min_window v)."""
    pot = newtonian_potential(profile, potential)
    mask = _window_mask(profile.grid, window)
    vmin = float(np.min(pot.values[mask]))
    constant = 2.0 * profile.lam * (1.0 + float(np.max(profile.values)) / vmin)
    margin = constant * pot.values - profile.values
    return NewtonComparison(constant, float(np.min(margin)), bool(np.all(margin > 0.0)))
