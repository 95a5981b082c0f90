"""Principal eigenvalues with indefinite weight and logistic steady states on R^N.

Radial finite differences for -Delta u = lam V u and -Delta u = lam (V u - f(u)):
the curve R -> lambda_1(R) on balls, its limit Lambda, monotone iteration on
expanding balls, and checks on the resulting profiles.
"""

from .diagnostics import (boundary_flux, decay_exponent, energy_identity, newton_comparison,
                          newtonian_potential, norms, profile_from_values,
                          radial_newton_potential)
from .eigen import dense_oracle, principal_shifted, principal_weighted, refinement_bracket
from .errors import (HypothesisViolation, MonotonicityViolation, NonConverged,
                     NoPositiveEigenvalue, SolverError, SolverFault)
from .grid import (RadialGrid, StiffnessForm, apply_stiffness, build_grid, grid_for_radius,
                   integrate, laplacian)
from .logistic import (SUB, SUPER, EntireSolution, Extinct, SolutionProfile, SolveOptions,
                       bifurcation_sweep, minimal_maximal_gap, monotone_solve_ball,
                       solve_entire)
from .problem import (AbsorptionTerm, Potential, constant_potential, gaussian_bump,
                      power_absorption, rational_decay, saturating_absorption,
                      supersolution_bound, tabulated, validate_absorption,
                      validate_potential)
from .threshold import LambdaCurve, LambdaEstimate, estimate_big_lambda, lambda_curve

__version__ = "0.1.0"
