"""The principal eigenvalue of the unit ball, three ways.

For V = 1 the weighted problem -Delta u = lam u on the unit ball of R^3 has
lambda_1 = pi^2 (the first zero of the spherical Bessel function j_0).  We
compute it by power iteration, by a dense solver, and watch the error shrink
by 4 each time the spacing halves.
"""

import numpy as np

from logistic_threshold import (build_grid, constant_potential, dense_oracle, principal_weighted,
                                refinement_bracket)

one = constant_potential(1.0)

print("nodes   lambda_1            error       ratio")
previous = None
for m in (127, 255, 511, 1023, 2047):
    lam = principal_weighted(build_grid(3, 1.0, m), one).lambda1
    err = lam - np.pi**2
    ratio = "" if previous is None else f"{previous / err:6.3f}"
    print(f"{m:5d}   {lam:.12f}  {err: .3e}  {ratio}")
    previous = err

# the dense solver returns the whole spectrum: (k pi)^2
spec = dense_oracle(build_grid(3, 1.0, 511), one)
print("\nfirst four eigenvalues / pi^2:", np.round(spec.eigenvalues[:4] / np.pi**2, 4))

# Richardson extrapolation from M and 2M+1 nodes
fine, extrapolated, err = refinement_bracket(3, 1.0, 255, one)
print(f"\nfine {fine:.10f}  extrapolated {extrapolated:.10f}  (pi^2 = {np.pi**2:.10f})")
