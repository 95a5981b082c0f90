"""Regenerate the frozen values in oracles.py by ODE shooting (independent of the grid code).

    python tests/make_oracles.py
"""

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq


def potential(r):
    return (1.0 + r * r) ** -2


def shoot(lam, radius, dim=3):
    """u(R) for u'' + (N-1)/r u' + lam V u = 0, u(0) = 1, u'(0) = 0."""
    r0 = 1e-6
    # series start: u = 1 - lam V(0) r^2 / (2N)
    u0 = 1.0 - lam * r0 * r0 / (2 * dim)
    du0 = -lam * r0 / dim

    def rhs(r, y):
        return [y[1], -(dim - 1) / r * y[1] - lam * potential(r) * y[0]]

    sol = solve_ivp(rhs, (r0, radius), [u0, du0], method="DOP853", rtol=1e-13, atol=1e-15)
    return sol.y[0, -1]


def first_eigenvalue(radius, guess):
    lo, hi = 0.9 * guess, 1.1 * guess
    # the next eigenvalue is far above 1.1 * guess, so this brackets only the first root
    return brentq(lambda lam: shoot(lam, radius), lo, hi, xtol=1e-14, rtol=1e-14)


if __name__ == "__main__":
    from logistic_threshold import grid_for_radius, principal_weighted, rational_decay

    v = rational_decay(1.0, 2.0)
    for radius in (1, 2, 4, 8, 16, 32, 64):
        fd = principal_weighted(grid_for_radius(3, radius, 256), v).lambda1
        print(f"    {radius}: {first_eigenvalue(radius, fd)!r},")
