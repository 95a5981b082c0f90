"""What the steady state looks like, and which of the predicted properties hold.

At lam = 1.5 Lambda we build the entire solution and check: the upper bound
u <= n / (1 + r^2), the energy identity, the Newtonian potential of V+ u, the
boundary flux, and the tail decay.

The predicted bound |u| <= C r^(2-N) holds, but for f = u^2 the profile
decays faster than that, like 2 / (lam r^2), and the fit window near the
outer boundary sees the Dirichlet layer.  Both effects show below.
"""

import numpy as np

from logistic_threshold import (boundary_flux, decay_exponent, energy_identity,
                                newton_comparison, newtonian_potential, norms, power_absorption,
                                rational_decay, solve_entire)

v = rational_decay(1.0, 2.0, decay_bound=(1.0, 2.0))
f = power_absorption(2.0)
lam = 1.5 * 3.0
entire = solve_entire(v, f, lam, (4, 8, 16, 32))
print(f"activation radius {entire.activation_radius:g}, stage deltas "
      f"{np.round(entire.stage_deltas, 4)}, converged {entire.converged}")
print(f"u <= n*/(1 + r^2) with n* = {entire.supersolution_constant:g}: {entire.supersolution_ok}\n")

print("  R    |flux|      energy gap   Newton residual   comparison C")
for p in entire.profiles:
    ident = energy_identity(p, v, f)
    newton = newtonian_potential(p, v)
    comp = newton_comparison(p, v)
    print(f" {p.grid.radius:3g}   {abs(boundary_flux(p)):.3e}   {ident.relative_gap:.2e}"
          f"     {newton.residual:.2e}          {comp.constant:.1f} ({comp.passed})")

final = entire.final
rep = norms(final, v, f)
print("\nR / (R/2) stability ratios:", {k: round(x, 4) for k, x in rep.ratios.items()})

print("\nlog-log slope of u by window:")
for lo, hi in [(0.125, 0.25), (0.25, 0.5), (0.5, 0.75), (2 / 3, 0.95)]:
    d = decay_exponent(final, window=(lo, hi))
    print(f"   r in [{d.window[0]:5.1f}, {d.window[1]:5.1f}]   slope {d.slope:6.2f}")
r, u = final.grid.nodes, final.values
mid = (r > 8) & (r < 16)
print(f"\nlam u r^2 / 2 on [8, 16]: median {np.median(lam * u[mid] * r[mid]**2 / 2):.3f}"
      " (tends to 1 for the r^-2 tail)")
