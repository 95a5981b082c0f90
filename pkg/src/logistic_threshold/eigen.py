"""Principal eigenpairs of the two radial pencils used by the logistic solver.

* weighted:  A phi = lambda_1 B phi,  B = diag(w_i V(r_i))  (B may be indefinite)
* shifted:   (A - lambda B) e = mu W e,  W = diag(w_i)

A is the SPD stiffness matrix of :mod:`logistic_threshold.grid`.  The weighted
problem is solved by power iteration on L^-1 B L^-T (A = L L^T, banded
Cholesky): its largest eigenvalue is 1 / lambda_1.  The shifted problem is
solved by shifted inverse iteration from a Gershgorin lower bound.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import NoPositiveEigenvalue, NonConverged
from .grid import StiffnessForm

DENSE_SIZE_LIMIT = 512
MAX_DEFLATIONS = 8
STALL_STEPS = 500


def tol_pos(vector):
    """Allowance for negative discretisation noise in a Perron vector."""
    return 1e-8 * float(np.max(np.abs(vector)))


@dataclass
class WeightedEigenResult:
    lambda1: float
    phi1: np.ndarray = field(repr=False)
    normalization: float
    iterations: int
    residual: float
    diagnostics: dict = field(default_factory=dict)


@dataclass
class ShiftedEigenResult:
    mu1: float
    e1: np.ndarray = field(repr=False)
    iterations: int
    residual: float
    shift: float
    diagnostics: dict = field(default_factory=dict)


@dataclass
class DenseSpectrum:
    """Full spectrum of a pencil, ascending.

    For the weighted pencil ``eigenvalues`` holds the positive-weight branch
    (1 / mu for mu > 0) and ``negative`` the reciprocals of mu < 0.
    """

    kind: str
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    negative: np.ndarray = field(default_factory=lambda: np.empty(0))


def _weight_diag(grid, potential):
    return grid.quad_weights * potential(grid.nodes)


def _banded_matvec(ab, x):
    """Product of a symmetric tridiagonal matrix in lower-banded storage with x."""
    out = ab[0] * x
    out[:-1] += ab[1, :-1] * x[1:]
    out[1:] += ab[1, :-1] * x[:-1]
    return out


def _upper_from_lower(factor):
    """Diagonal-ordered storage of L^T given L in lower-banded storage."""
    return np.vstack([np.concatenate(([0.0], factor[1, :-1])), factor[0]])


def _pencil_residual(ab, bdiag, x, lam):
    ax = _banded_matvec(ab, x)
    return float(np.linalg.norm(ax - lam * bdiag * x) / np.linalg.norm(ax))


def _fix_sign(x):
    return -x if x[np.argmax(np.abs(x))] < 0 else x


def principal_weighted(grid, potential, tol=1e-10, max_iter=None):
    """lambda_1(R) = min a(u, u) / b(u, u) over b(u, u) > 0, with its eigenvector.

    Power iteration runs on C = L^-1 B L^-T.  Converged eigenvectors with a
    negative Rayleigh quotient (directions dominated by V-) are deflated
    until the dominant eigenvalue is positive.  If that takes more than
    MAX_DEFLATIONS vectors, or a negative phase stalls, the solve switches to
    shift-invert iteration (see ``_shift_invert_weighted``).

    Raises:
        NoPositiveEigenvalue: V <= 0 at every node.
        NonConverged: ``max_iter`` steps without meeting both stopping tests.
    """
    bdiag = _weight_diag(grid, potential)
    if not np.any(bdiag > 0.0):
        raise NoPositiveEigenvalue("V <= 0 on every grid node; b(u, u) > 0 is impossible")
    m = grid.node_count
    max_iter = 50 * m if max_iter is None else max_iter

    ab = StiffnessForm(grid).banded
    low = sla.cholesky_banded(ab, lower=True)
    up = _upper_from_lower(low)

    def apply_c(y):
        x = sla.solve_banded((0, 1), up, y, check_finite=False)
        return sla.solve_banded((1, 0), low, bdiag * x, check_finite=False)

    deflated = []  # (theta, q) pairs, q orthonormal

    def start():
        y = np.ones(m)
        for _, q in deflated:
            y -= (q @ y) * q
        return y / np.linalg.norm(y)

    y = start()
    theta_old = None
    changes = []
    for it in range(1, max_iter + 1):
        z = apply_c(y)
        for th, q in deflated:
            z -= th * (q @ y) * q
        theta = float(y @ z)
        if theta_old is not None:
            changes.append(abs(theta - theta_old))
            # ||A x - lam B x||_{A^-1} / ||A x||_{A^-1} equals this y-space ratio
            resid = float(np.linalg.norm(z - theta * y) / abs(theta))
            if changes[-1] <= tol * abs(theta) and resid <= tol:
                if theta < 0.0:
                    if len(deflated) >= MAX_DEFLATIONS:
                        return _shift_invert_weighted(ab, low, bdiag, tol, max_iter, it)
                    deflated.append((theta, y.copy()))
                    y = start()
                    theta_old = None
                    changes.clear()
                    continue
                x = _fix_sign(sla.solve_banded((0, 1), up, y, check_finite=False))
                x = x / np.sqrt(float(x @ (bdiag * x)))
                lam = 1.0 / theta
                rate = None
                if len(changes) >= 3 and changes[-3] > 0:
                    rate = float(np.sqrt(changes[-2] / changes[-3]))
                return WeightedEigenResult(
                    lambda1=lam, phi1=x, normalization=float(x @ (bdiag * x)),
                    iterations=it, residual=resid,
                    diagnostics={"deflated": len(deflated),
                                 "gap_ratio_estimate": rate,
                                 "method": "power",
                                 "euclidean_residual": _pencil_residual(ab, bdiag, x, lam),
                                 "min_component": float(np.min(x) / np.max(np.abs(x)))},
                )
        theta_old = theta
        y = z / np.linalg.norm(z)
        if (deflated or theta < 0.0) and len(changes) > STALL_STEPS:
            # negative directions nearly tie with the positive one
            return _shift_invert_weighted(ab, low, bdiag, tol, max_iter, it)

    x = sla.solve_banded((0, 1), up, y, check_finite=False)
    raise NonConverged(f"power iteration did not converge in {max_iter} steps",
                       best=_fix_sign(x), iterations=max_iter)


def _shift_invert_weighted(ab, low, bdiag, tol, max_iter, spent):
    """Fallback when V- dominates the spectrum of C: locate lambda_1 by inertia,
    then run power iteration on (A - s B)^-1 B with s just below lambda_1.

    For s >= 0, A - s B is positive definite exactly when s < lambda_1.
    """
    def factor(shift):
        trial = ab.copy()
        trial[0] -= shift * bdiag
        try:
            return sla.cholesky_banded(trial, lower=True, check_finite=False)
        except sla.LinAlgError:
            return None

    probe = np.maximum(bdiag, 0.0)
    lo, hi = 0.0, float(probe @ _banded_matvec(ab, probe)) / float(probe @ (bdiag * probe))
    fac = low
    while hi - lo > 1e-10 * hi:
        mid = 0.5 * (lo + hi)
        trial = factor(mid)
        if trial is None:
            hi = mid
        else:
            lo, fac = mid, trial
    x = np.maximum(bdiag, 0.0) + 1e-3 * np.max(np.abs(bdiag))
    lam_old = None
    for it in range(1, max_iter + 1):
        x = sla.cho_solve_banded((fac, True), bdiag * x, check_finite=False)
        x /= np.linalg.norm(x)
        ax = _banded_matvec(ab, x)
        lam = float(x @ ax) / float(x @ (bdiag * x))
        r = ax - lam * bdiag * x
        # A^-1 norms via the Cholesky factor of A
        resid = _energy_residual(low, r, x)
        if lam_old is not None and abs(lam - lam_old) <= tol * abs(lam) and resid <= tol:
            x = _fix_sign(x)
            x = x / np.sqrt(float(x @ (bdiag * x)))
            return WeightedEigenResult(
                lambda1=lam, phi1=x, normalization=float(x @ (bdiag * x)),
                iterations=spent + it, residual=resid,
                diagnostics={"deflated": MAX_DEFLATIONS, "method": "shift-invert",
                             "shift": lo, "gap_ratio_estimate": None,
                             "euclidean_residual": _pencil_residual(ab, bdiag, x, lam),
                             "min_component": float(np.min(x) / np.max(np.abs(x)))},
            )
        lam_old = lam
    raise NonConverged("shift-invert iteration did not converge", best=_fix_sign(x),
                       iterations=spent + max_iter)


def _energy_residual(factor, r, x):
    """||r||_{A^-1} / ||A x||_{A^-1} for SPD A = L L^T given L in lower-banded storage.

    Plain Euclidean residuals of these pencils stall near 1e-11 from
    cancellation in the stiffness stencil; this ratio does not.
    """
    lt_x = factor[0] * x
    lt_x[:-1] += factor[1, :-1] * x[1:]
    return float(np.linalg.norm(sla.solve_banded((1, 0), factor, r, check_finite=False))
                 / np.linalg.norm(lt_x))


def _gershgorin_lower(sdiag, soff, w):
    """Lower bound of the spectrum of W^-1/2 S W^-1/2."""
    scale = np.abs(soff) / np.sqrt(w[:-1] * w[1:])
    radius = np.zeros_like(w)
    radius[:-1] += scale
    radius[1:] += scale
    return float(np.min(sdiag / w - radius))


def _try_factor(sdiag, soff, w, shift):
    ab = np.zeros((2, w.size))
    ab[0] = sdiag - shift * w
    ab[1, :-1] = soff
    try:
        return sla.cholesky_banded(ab, lower=True, check_finite=False)
    except sla.LinAlgError:
        return None


def principal_shifted(grid, potential, lam, tol=1e-10, max_iter=None):
    """Least eigenpair (mu_1, e_1) of (A - lam B) e = mu W e, with e_1 >= 0, max e_1 = 1.

    The shift starts at a Gershgorin lower bound of the W-scaled pencil and is
    pushed up by bisection: a Cholesky factorisation of S - s W succeeds
    exactly when s < mu_1, so a failed factorisation sends the shift back
    down.  Inverse iteration from the final shift then converges in a few
    steps.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    m = grid.node_count
    max_iter = 50 * m if max_iter is None else max_iter
    w = grid.quad_weights
    ab = StiffnessForm(grid).banded
    bdiag = _weight_diag(grid, potential)
    sdiag = ab[0] - lam * bdiag
    soff = ab[1, :-1]
    s_ab = np.vstack([sdiag, ab[1]])

    lo = _gershgorin_lower(sdiag, soff, w)
    lo -= 1e-3 * abs(lo) + 1e-12
    factor = _try_factor(sdiag, soff, w, lo)
    retries = 0
    while factor is None:
        retries += 1
        if retries > 60:
            raise NonConverged("could not factor the shifted pencil")
        lo -= 2.0 * abs(lo) + 1.0
        factor = _try_factor(sdiag, soff, w, lo)

    # Rayleigh quotient of a positive vector bounds mu_1 from above
    x = np.ones(m)
    hi = float(x @ _banded_matvec(s_ab, x)) / float(x @ (w * x))
    bisections = 0
    while hi - lo > 1e-9 * max(abs(hi), abs(lo), 1e-300) and bisections < 200:
        mid = 0.5 * (lo + hi)
        trial = _try_factor(sdiag, soff, w, mid)
        if trial is None:
            hi = mid
        else:
            lo, factor = mid, trial
        bisections += 1
    shift = lo

    stiff_factor = sla.cholesky_banded(ab, lower=True, check_finite=False)
    # mu_1 may be ~0 (lam = lambda_1), so the eigenvalue test is scaled by lam |V|
    scale = max(lam * float(np.max(np.abs(bdiag / w))), 1e-300)
    mu_old = None
    for it in range(1, max_iter + 1):
        x = sla.cho_solve_banded((factor, True), w * x, check_finite=False)
        x /= np.max(np.abs(x))
        sx = _banded_matvec(s_ab, x)
        wx = w * x
        mu = float(x @ sx) / float(x @ wx)
        resid = _energy_residual(stiff_factor, sx - mu * wx, x)
        if mu_old is not None and abs(mu - mu_old) <= tol * max(abs(mu), scale) \
                and resid <= tol:
            e1 = _fix_sign(x)
            e1 = e1 / np.max(e1)
            return ShiftedEigenResult(
                mu1=mu, e1=e1, iterations=it, residual=resid, shift=shift,
                diagnostics={"bisections": bisections, "shift_retries": retries},
            )
        mu_old = mu

    raise NonConverged(f"inverse iteration did not converge in {max_iter} steps",
                       best=_fix_sign(x), iterations=max_iter)


def dense_oracle(grid, potential, lam=None):
    """Full spectrum by a dense symmetric-definite solver (test oracle).

    ``lam=None`` gives the weighted pencil, via B x = mu A x (A is SPD);
    otherwise the shifted pencil (A - lam B) x = mu W x.

    Raises:
        ValueError: node_count above the dense size limit.
    """
    m = grid.node_count
    if m > DENSE_SIZE_LIMIT:
        raise ValueError(f"dense oracle limited to {DENSE_SIZE_LIMIT} nodes, got {m}")
    a = StiffnessForm(grid).to_dense()
    bdiag = _weight_diag(grid, potential)
    if lam is None:
        mu, vecs = sla.eigh(np.diag(bdiag), a)
        pos = mu > 0
        order = np.argsort(1.0 / mu[pos])
        neg = mu < 0
        return DenseSpectrum("weighted", (1.0 / mu[pos])[order], vecs[:, pos][:, order],
                             negative=np.sort(1.0 / mu[neg])[::-1])
    mu, vecs = sla.eigh(a - lam * np.diag(bdiag), np.diag(grid.quad_weights))
    return DenseSpectrum("shifted", mu, vecs)


def refinement_bracket(dim, radius, node_count, potential, tol=1e-10):
    """lambda_1 on M and 2M+1 nodes with a Richardson estimate of the grid error.

    Returns (fine value, extrapolated value, |fine - extrapolated|).
    """
    from .grid import build_grid

    coarse = principal_weighted(build_grid(dim, radius, node_count), potential, tol).lambda1
    fine = principal_weighted(build_grid(dim, radius, 2 * node_count + 1), potential, tol).lambda1
    extrapolated = fine + (fine - coarse) / 3.0
    return fine, extrapolated, abs(fine - extrapolated)
