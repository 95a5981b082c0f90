"""Frozen reference values, each from an oracle independent of the grid code.

Regenerate the shooting table with ``python tests/make_oracles.py``.
"""

import numpy as np

# first Dirichlet eigenvalue of the unit ball: j_{1/2,1}^2 in R^3
PI_SQUARED = np.pi**2

# V = (1 + r^2)^-2 in R^3: u = (1 + r^2)^-1/2 solves -Delta u = 3 V u,
# (u in D^{1,2} but not L^2), so lambda_1(R) decreases to Lambda = 3
EXACT_BIG_LAMBDA = 3.0

# lambda_1(R) for V = (1 + r^2)^-2, N = 3, by ODE shooting (DOP853, rtol 1e-13)
SHOOTING_LAMBDA1 = {
    1: 14.999999999999941,
    2: 7.051704403192125,
    4: 4.61477223766594,
    8: 3.7173499908453502,
    16: 3.337901083335589,
    32: 3.1639785708338932,
    64: 3.0807741029491846,
}

# int_{R^3} (1 + r^2)^-2 dx = 4 pi * pi / 4
LORENTZIAN_L2_SQUARED = np.pi**2


def uniform_ball_potential(r):
    """Newtonian potential of rho = 1 on the unit ball in R^3, inside the ball."""
    return (3.0 - r * r) / 6.0
