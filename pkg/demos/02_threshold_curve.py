"""lambda_1(R) on growing balls and its limit Lambda.

For a potential that decays like (1 + r^2)^-2 the curve levels off at a
positive value (here exactly 3, since (1 + r^2)^-1/2 solves -Delta u = 3 V u).
For V = 1 it falls like pi^2 / R^2 and the limit is 0.
"""

from logistic_threshold import (constant_potential, estimate_big_lambda, lambda_curve,
                                rational_decay)

for name, potential in [("(1 + r^2)^-2", rational_decay(1.0, 2.0, decay_bound=(1.0, 2.0))),
                        ("1", constant_potential(1.0))]:
    curve = lambda_curve(potential)
    est = estimate_big_lambda(curve)
    print(f"V = {name}")
    for r, lam in zip(curve.radii, curve.lambda1):
        print(f"   R = {r:5.0f}   lambda_1 = {lam:.8f}")
    print(f"   Lambda ~ {est.value:.5f}  in [{est.low:.5f}, {est.high:.5f}]"
          f"  (beta = {est.diagnostics.get('beta', float('nan')):.2f})\n")
