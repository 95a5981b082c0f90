"""Monotone (sub/supersolution) iteration for -Delta u = lam (V u - f(u)).

On a ball the iteration is

    (A + lam K W) u_{k+1} = lam W (V u_k - f(u_k) + K u_k)

with K >= sup_[0, M] f' + sup|V| + 1.  The right-hand side is then
nondecreasing in u on [0, M] and (A + lam K W)^-1 is entrywise nonnegative
(an M-matrix inverse), so iterates started at a subsolution increase and
iterates started at a supersolution decrease.  Every step is checked.

Entire solutions are built on an increasing sequence of balls, each stage
warm-started from the zero extension of the previous one.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .eigen import principal_shifted, principal_weighted, tol_pos
from .errors import MonotonicityViolation, NonConverged, SolverError, SolverFault
from .grid import StiffnessForm, apply_stiffness, grid_for_radius
from .problem import supersolution_bound

SUB = "sub"
SUPER = "super"

# mu1 must be below -MU1_MARGIN * lam before a positive solution is expected
MU1_MARGIN = 1e-8

# process-wide tally of order checks made by monotone_solve_ball
MONOTONE_STATS = {"steps_checked": 0, "violations": 0}


@dataclass
class SolveOptions:
    """Tolerances for the monotone iteration.

    ``extinction_tol`` defaults to 1e-10 times the supersolution bound M.
    ``tol_stage`` is relative to the sup norm of the newer stage.
    ``nodes_per_unit`` sets the spacing of the expanding balls; the iteration
    count barely depends on it, so each halving of h doubles the cost.
    """

    tol_fix: float = 1e-10
    tol_res: float = 1e-8
    extinction_tol: Optional[float] = None
    max_iter: int = 2_000_000
    eig_tol: float = 1e-11
    mono_tol: float = 1e-12
    tol_stage: float = 5e-2
    nodes_per_unit: int = 64
    dim: int = 3

    def __post_init__(self):
        for name in ("tol_fix", "tol_res", "eig_tol", "mono_tol", "tol_stage"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.extinction_tol is not None and not self.extinction_tol > 0:
            raise ValueError("extinction_tol must be positive")


@dataclass
class SolutionProfile:
    grid: object = field(repr=False)
    lam: float
    values: np.ndarray = field(repr=False)
    branch: str
    iterations: int
    update_norm: float
    residual: float
    bound: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def radii(self):
        return self.grid.nodes

    @property
    def sup_norm(self):
        return float(np.max(self.values))


@dataclass
class Extinct:
    """No positive solution was found: the iteration collapsed to zero."""

    lam: float
    reason: str
    trajectory: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    radius: Optional[float] = None
    mu1: Optional[float] = None
    iterations: int = 0


@dataclass
class EntireSolution:
    lam: float
    stages: list = field(repr=False)
    stage_deltas: list
    final: SolutionProfile = field(repr=False)
    converged: bool
    activation_radius: float
    supersolution_constant: float
    supersolution_ok: bool
    decay: object = None

    @property
    def profiles(self):
        return [s for s in self.stages if isinstance(s, SolutionProfile)]


def monotonization_constant(f, bound, sup_v, samples=4097):
    """K = sup_[0, bound] f' + sup|V| + 1 (sup of f' by dense sampling)."""
    u = np.linspace(0.0, bound, samples)
    return float(np.max(f.prime(u))) + float(sup_v) + 1.0


def discrete_residual(grid, potential, f, lam, u):
    """Relative sup-norm residual of A u = lam W (V u - f(u))."""
    form = StiffnessForm(grid)
    au = apply_stiffness(form, u)
    rhs = lam * grid.quad_weights * (potential(grid.nodes) * u - f(u))
    scale = np.max(np.abs(au)) + np.max(np.abs(rhs))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(au - rhs)) / scale)


def subsolution_epsilon(mu1, e1, f, lam, floor=1e-300):
    """Largest eps in {1, 1/2, 1/4, ...} with eps mu1 e1 + lam f(eps e1) <= 0 at every node."""
    eps = 1.0
    while eps >= floor:
        if np.all(eps * mu1 * e1 + lam * f(eps * e1) <= 0.0):
            return eps
        eps *= 0.5
    raise SolverError("subsolution scale underflowed while halving eps")


def monotone_solve_ball(grid, potential, f, lam, start=SUB, opts=None, initial=None):
    """Solve the Dirichlet problem on the ball of ``grid`` by monotone iteration.

    ``start='sub'`` iterates up from eps e1 (or from ``initial``, which must be
    a discrete subsolution, e.g. the zero extension of a smaller ball's
    solution); ``start='super'`` iterates down from the constant M.

    Returns a SolutionProfile, or Extinct if the iterates collapse to zero or
    no subsolution exists (mu1 >= 0).

    Raises:
        HypothesisViolation: f admits no constant supersolution.
        MonotonicityViolation: iterates left the expected order.
    """
    if start not in (SUB, SUPER):
        raise ValueError(f"start must be 'sub' or 'super', got {start!r}")
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    opts = opts or SolveOptions()
    w = grid.quad_weights
    v = potential(grid.nodes)
    sup_v = potential.grid_sup_norm(grid)
    bound = supersolution_bound(f, sup_v)
    k_const = monotonization_constant(f, bound, sup_v)
    ext_tol = opts.extinction_tol if opts.extinction_tol is not None else 1e-10 * bound
    diag = {"K": k_const}

    if start == SUPER:
        u = np.full(grid.node_count, bound)
    elif initial is not None:
        u = np.clip(np.asarray(initial, dtype=float), 0.0, bound)
    else:
        shifted = principal_shifted(grid, potential, lam, tol=opts.eig_tol)
        diag["mu1"] = shifted.mu1
        if shifted.mu1 >= 0.0:
            return Extinct(lam, "mu1 >= 0: lambda does not exceed lambda_1 of this ball",
                           radius=grid.radius, mu1=shifted.mu1)
        e1 = np.maximum(shifted.e1, 0.0)
        eps = subsolution_epsilon(shifted.mu1, e1, f, lam)
        diag["epsilon"] = eps
        u = eps * e1

    ab = StiffnessForm(grid).banded.copy()
    ab[0] += lam * k_const * w
    factor = sla.cholesky_banded(ab, lower=True, check_finite=False)
    gain = lam * w * (v + k_const)
    lam_w = lam * w
    sign = 1.0 if start == SUB else -1.0

    trajectory = [float(np.max(u))]
    delta_prev = None
    delta = np.inf
    for it in range(1, opts.max_iter + 1):
        u_new = sla.cho_solve_banded((factor, True), gain * u - lam_w * f(u),
                                     check_finite=False)
        step = u_new - u
        slack = opts.mono_tol * max(float(np.max(np.abs(u))), 1e-300)
        MONOTONE_STATS["steps_checked"] += 1
        if np.min(sign * step) < -slack:
            MONOTONE_STATS["violations"] += 1
            bad = int(np.sum(sign * step < -slack))
            raise MonotonicityViolation(
                f"{start} iteration lost monotonicity at step {it} on {bad} nodes "
                f"(worst {float(np.min(sign * step)):.3e})"
            )
        delta = float(np.max(np.abs(step)))
        u = u_new
        sup = float(np.max(u))
        trajectory.append(sup)
        if sup < ext_tol:
            return Extinct(lam, "iterates fell below the extinction threshold",
                           np.asarray(trajectory), radius=grid.radius, iterations=it)
        if delta < opts.tol_fix and delta_prev:
            rate = delta / delta_prev
            tail = delta * rate / (1.0 - rate) if rate < 1.0 else np.inf
            if tail < opts.tol_fix:
                resid = discrete_residual(grid, potential, f, lam, u)
                if resid <= opts.tol_res:
                    diag["rate"] = rate
                    return SolutionProfile(grid, lam, u, start, it, delta, resid, bound, diag)
        delta_prev = delta

    raise NonConverged(f"monotone iteration did not converge in {opts.max_iter} steps "
                       f"(last update {delta:.3e})", best=u, iterations=opts.max_iter)


def minimal_maximal_pair(grid, potential, f, lam, opts=None):
    """Minimal and maximal solutions on the ball (from eps e1 and from M).

    Raises:
        SolverFault: lambda does not exceed lambda_1 of the ball (mu1 is not
            clearly negative), or either run collapses to zero.
    """
    opts = opts or SolveOptions()
    mu1 = principal_shifted(grid, potential, lam, tol=opts.eig_tol).mu1
    if not mu1 < -MU1_MARGIN * lam:
        raise SolverFault(f"lambda={lam} does not exceed lambda_1 of the ball (mu1={mu1:.3e}); "
                          "the minimal and maximal solutions are both zero there")
    low = monotone_solve_ball(grid, potential, f, lam, SUB, opts)
    high = monotone_solve_ball(grid, potential, f, lam, SUPER, opts)
    if isinstance(low, Extinct) or isinstance(high, Extinct):
        raise SolverFault(f"extinction at lambda={lam} although a positive solution "
                          "was expected (lambda must exceed lambda_1 of the ball)")
    slack = 1e-8 * high.sup_norm
    if np.any(low.values > high.values + slack):
        raise SolverFault("minimal solution exceeds maximal solution")
    return low, high


def minimal_maximal_gap(grid, potential, f, lam, opts=None):
    """||u_min - u_max||_inf / ||u_max||_inf; uniqueness predicts ~0."""
    low, high = minimal_maximal_pair(grid, potential, f, lam, opts)
    return float(np.max(np.abs(high.values - low.values)) / high.sup_norm)


def _extend(values, size):
    out = np.zeros(size)
    out[: values.size] = values
    return out


def supersolution_witness(potential, f, lam, dim, radii, n_min=2.0**-20, n_max=2.0**40):
    """Smallest n in a doubling sequence making n / (1 + r^2) a supersolution at ``radii``.

    Supersolution means -Delta ubar >= lam (V ubar - f(ubar)), i.e.
    2 (N (1 + r^2) - 4 r^2) / (1 + r^2)^2 >= lam (V - f(ubar) / ubar).
    Returns None if no n up to ``n_max`` works.
    """
    r = np.asarray(radii, dtype=float)
    s = 1.0 + r * r
    lhs = 2.0 * (dim * s - 4.0 * r * r) / (s * s)
    vr = potential(r)
    n = n_min
    while n <= n_max:
        ubar = n / s
        if np.all(lhs >= lam * (vr - f(ubar) / ubar)):
            return n
        n *= 2.0
    return None


def solve_entire(potential, f, lam, radii_schedule, opts=None):
    """Entire solution by expanding balls: stage n warm-starts from stage n-1.

    Stops early once the relative sup-norm change on the shared region drops
    below ``opts.tol_stage``.  Returns Extinct when every stage is extinct.
    """
    opts = opts or SolveOptions()
    schedule = [float(r) for r in radii_schedule]
    if not schedule:
        raise ValueError("empty radius schedule")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("radius schedule must be strictly increasing")
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")

    stages, deltas = [], []
    previous = None
    converged = False
    for radius in schedule:
        grid = grid_for_radius(opts.dim, radius, opts.nodes_per_unit)
        if previous is None:
            result = monotone_solve_ball(grid, potential, f, lam, SUB, opts)
        else:
            start = _extend(previous.values, grid.node_count)
            result = monotone_solve_ball(grid, potential, f, lam, SUB, opts, initial=start)
            if isinstance(result, Extinct):
                raise SolverFault(f"stage R={radius} collapsed although R={previous.grid.radius} "
                                  "had a positive solution")
            shared = previous.values.size
            drop = previous.values - result.values[:shared]
            if np.max(drop) > opts.mono_tol * previous.sup_norm + 1e-300:
                raise MonotonicityViolation(f"stage R={radius} fell below the previous stage")
            delta = float(np.max(np.abs(drop)) / result.sup_norm)
            deltas.append(delta)
        stages.append(result)
        if isinstance(result, SolutionProfile):
            previous = result
            if deltas and deltas[-1] < opts.tol_stage:
                converged = True
                break

    if previous is None:
        last = stages[-1]
        return Extinct(lam, "extinct on every ball of the schedule", last.trajectory,
                       radius=last.radius, mu1=last.mu1, iterations=last.iterations)

    activation = next(s.grid.radius for s in stages if isinstance(s, SolutionProfile))
    # check the witness on the computed balls and well beyond them
    check_r = np.concatenate([previous.grid.nodes,
                              np.geomspace(previous.grid.radius, 100.0 * previous.grid.radius, 400)])
    n_star = supersolution_witness(potential, f, lam, opts.dim, check_r)
    ok = n_star is not None and all(
        np.all(p.values <= n_star / (1.0 + p.grid.nodes**2) * (1.0 + 1e-10))
        for p in stages if isinstance(p, SolutionProfile)
    )
    entire = EntireSolution(lam, stages, deltas, previous, converged, activation,
                            float("nan") if n_star is None else n_star, bool(ok))
    try:
        from .diagnostics import decay_exponent

        entire.decay = decay_exponent(previous)
    except ValueError:
        entire.decay = None
    return entire


@dataclass
class SweepRow:
    lam: float
    exists: bool
    sup_norm: float
    stages: int
    iterations: int
    activation_radius: Optional[float]


@dataclass
class SweepTable:
    rows: list
    lambda_emp: Optional[float]
    results: list = field(default_factory=list, repr=False)


def bifurcation_sweep(potential, f, lambda_grid, radii_schedule, opts=None):
    """solve_entire at each lambda; the empirical threshold is the midpoint between
    the largest extinct and the smallest existing lambda.
    """
    lambdas = [float(x) for x in lambda_grid]
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("lambda grid must be strictly increasing")
    rows, results = [], []
    for lam in lambdas:
        res = solve_entire(potential, f, lam, radii_schedule, opts)
        results.append(res)
        if isinstance(res, Extinct):
            rows.append(SweepRow(lam, False, 0.0, 0, res.iterations, None))
        else:
            its = sum(p.iterations for p in res.profiles)
            rows.append(SweepRow(lam, True, res.final.sup_norm, len(res.profiles), its,
                                 res.activation_radius))
    extinct = [r.lam for r in rows if not r.exists]
    alive = [r.lam for r in rows if r.exists]
    lam_emp = None
    if extinct and alive:
        lam_emp = 0.5 * (max(extinct) + min(alive))
    return SweepTable(rows, lam_emp, results)
