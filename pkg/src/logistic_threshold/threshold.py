"""The curve R -> lambda_1(R) and an extrapolated estimate of its limit Lambda."""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .eigen import principal_weighted
from .grid import grid_for_radius

DEFAULT_SCHEDULE = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


@dataclass
class LambdaCurve:
    radii: np.ndarray
    lambda1: np.ndarray
    residual: np.ndarray
    nodes_per_unit: int
    dim: int
    tol: float = 1e-10
    resolution_failure: bool = False

    def __len__(self):
        return self.radii.size

    def is_monotone(self):
        return bool(np.all(np.diff(self.lambda1) < self.tol * self.lambda1[1:]))


@dataclass
class LambdaEstimate:
    value: float
    low: float
    high: float
    model: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def width(self):
        return self.high - self.low

    def to_dict(self):
        return {"value": self.value, "bracket": [self.low, self.high],
                "model": self.model, "diagnostics": self.diagnostics}


def lambda_curve(potential, radii_schedule=DEFAULT_SCHEDULE, nodes_per_unit=256, dim=3,
                 tol=1e-10):
    """lambda_1(R) along an increasing schedule at fixed spacing 1 / nodes_per_unit."""
    radii = np.asarray(radii_schedule, dtype=float)
    if radii.ndim != 1 or radii.size == 0:
        raise ValueError("radius schedule must be a non-empty 1-D sequence")
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radius schedule must be strictly increasing")
    values, resid = [], []
    for radius in radii:
        res = principal_weighted(grid_for_radius(dim, radius, nodes_per_unit), potential, tol)
        values.append(res.lambda1)
        resid.append(res.residual)
    curve = LambdaCurve(radii, np.array(values), np.array(resid), nodes_per_unit, dim, tol)
    if not curve.is_monotone():
        curve.resolution_failure = True
        warnings.warn("lambda_1(R) is not decreasing along the schedule; "
                      "raise nodes_per_unit", RuntimeWarning, stacklevel=2)
    return curve


def _fit_power_tail(radii, values):
    """Fit values ~ L + c R^-beta from successive differences (log-space least squares).

    Returns (L, c, beta, max model residual) or None if the differences are
    not all positive.
    """
    d = -np.diff(values)
    if np.any(d <= 0):
        return None
    r0, r1 = radii[:-1], radii[1:]
    logd = np.log(d)

    def profile(beta):
        basis = np.log(r0**-beta - r1**-beta)
        logc = np.mean(logd - basis)
        return logc, float(np.sum((logd - logc - basis) ** 2))

    if d.size == 1:
        # two differences would be needed to pin beta; assume the V = 1 rate
        beta = 2.0
    else:
        beta = minimize_scalar(lambda b: profile(b)[1], bounds=(1e-3, 12.0),
                               method="bounded", options={"xatol": 1e-10}).x
    c = float(np.exp(profile(beta)[0]))
    limit = float(np.mean(values - c * radii**-beta))
    misfit = float(np.max(np.abs(values - limit - c * radii**-beta)))
    return limit, c, float(beta), misfit


def estimate_big_lambda(curve, tail=4):
    """Extrapolate Lambda = lim lambda_1(R) from the last ``tail`` curve points.

    The bracket is [max(0, L - err), lambda_1(R_last)], where err is the fit
    misfit plus the change in L from fitting the window one radius earlier.

    Raises:
        ValueError: fewer than 4 entries, or a curve that is not decreasing.
    """
    if len(curve) < 4:
        raise ValueError("need at least 4 curve entries to estimate Lambda")
    if not curve.is_monotone():
        raise ValueError("curve is not decreasing; refusing to extrapolate")
    tail = max(3, min(tail, len(curve)))
    radii = curve.radii[-tail:]
    values = curve.lambda1[-tail:]
    last = float(values[-1])

    fit = _fit_power_tail(radii, values)
    if fit is None or fit[2] <= 0:
        return LambdaEstimate(last, 0.0, last, "fallback",
                              {"reason": "power-law fit failed"})
    limit, c, beta, misfit = fit
    diag = {"c": c, "beta": beta, "misfit": misfit, "tail": int(tail)}
    # how far the estimate moved when the last radius was added
    sensitivity = 0.0
    if len(curve) > tail:
        earlier = _fit_power_tail(curve.radii[-tail - 1:-1], curve.lambda1[-tail - 1:-1])
    else:
        earlier = _fit_power_tail(radii[:-1], values[:-1])
    if earlier is not None:
        sensitivity = abs(earlier[0] - limit)
        diag["previous_window_value"] = earlier[0]
    fit_err = misfit + sensitivity
    value = min(max(limit, 0.0), last)
    diag["fit_err"] = fit_err
    return LambdaEstimate(value, max(0.0, value - fit_err), last, "Lambda + c R^-beta", diag)
