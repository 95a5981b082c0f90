"""Potentials V(r), absorption terms f(u) and sampling-based hypothesis checks.

The structural assumptions on the data are analytic statements; here they are
checked on dense log-spaced samples, and every report keeps the samples it
used so a failure can be reproduced.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import HypothesisViolation

PASS = "pass"
FAIL = "fail"
NOT_CHECKABLE = "not-checkable"

SUPERSOLUTION_SEARCH_LIMIT = 2.0**64


@dataclass(frozen=True)
class Potential:
    """Radial, possibly sign-changing potential V(r).

    ``decay_bound`` is an optional pair (A, alpha) asserting
    V+(r) <= A r^(-2-alpha).  When ``sup_norm`` is not supplied it is
    estimated by sampling (see :meth:`estimated_sup_norm`).
    """

    func: Callable[[np.ndarray], np.ndarray]
    sup_norm: Optional[float] = None
    decay_bound: Optional[tuple] = None
    family: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.broadcast_to(np.asarray(self.func(r), dtype=float), r.shape).copy()

    def positive_part(self, r):
        return np.maximum(self(r), 0.0)

    def negative_part(self, r):
        return np.maximum(-self(r), 0.0)

    def estimated_sup_norm(self, r_max=1e3, samples=20001):
        """The declared sup norm, or max |V| over a dense sample of (0, r_max]."""
        if self.sup_norm is not None:
            return float(self.sup_norm)
        r = np.concatenate(
            [np.linspace(0.0, min(r_max, 10.0), samples)[1:], np.geomspace(10.0, r_max, 2001)]
        )
        return float(np.max(np.abs(self(r))))

    def grid_sup_norm(self, grid):
        """Sup norm valid on a grid: never smaller than max |V| at its nodes."""
        return max(self.estimated_sup_norm(), float(np.max(np.abs(self(grid.nodes)))))


@dataclass(frozen=True)
class AbsorptionTerm:
    """Absorption f(u), u >= 0, with its derivative f'(u)."""

    func: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    superlinear_limit: Optional[float] = None
    family: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, u):
        return np.asarray(self.func(np.asarray(u, dtype=float)), dtype=float)

    def prime(self, u):
        return np.asarray(self.derivative(np.asarray(u, dtype=float)), dtype=float)


# -- built-in families -------------------------------------------------------

def rational_decay(a, p, b=0.0, q=1.0, decay_bound=None):
    """V(r) = a (1 + r^2)^-p - b (1 + r^2)^-q."""
    a, p, b, q = float(a), float(p), float(b), float(q)

    def func(r):
        s = 1.0 + r * r
        return a * s**-p - b * s**-q

    return Potential(
        func,
        decay_bound=None if decay_bound is None else tuple(map(float, decay_bound)),
        family="rational_decay",
        params={"a": a, "p": p, "b": b, "q": q},
    )


def gaussian_bump(c, decay_bound=None):
    """V(r) = (c - r^2) exp(-r^2): positive core, negative shell when c > 0."""
    c = float(c)
    return Potential(
        lambda r: (c - r * r) * np.exp(-r * r),
        decay_bound=None if decay_bound is None else tuple(map(float, decay_bound)),
        family="gaussian_bump",
        params={"c": c},
    )


def constant_potential(value=1.0):
    """V identically equal to ``value`` (no decay)."""
    value = float(value)
    return Potential(
        lambda r: np.full_like(r, value),
        sup_norm=abs(value),
        family="constant",
        params={"value": value},
    )


def tabulated(radii, values, decay_bound=None):
    """Piecewise-linear V through (radii, values); end values are held constant."""
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    if radii.ndim != 1 or radii.shape != values.shape or radii.size < 2:
        raise ValueError("tabulated potential needs two equal-length columns (>= 2 rows)")
    if np.any(np.diff(radii) <= 0):
        raise ValueError("tabulated radii must be strictly increasing")
    radii.flags.writeable = False
    values.flags.writeable = False
    return Potential(
        lambda r: np.interp(r, radii, values),
        sup_norm=float(np.max(np.abs(values))),
        decay_bound=None if decay_bound is None else tuple(map(float, decay_bound)),
        family="tabulated",
        params={"rows": int(radii.size)},
    )


def power_absorption(p):
    """f(u) = u^p with p > 1."""
    p = float(p)
    if not p > 1.0:
        raise ValueError(f"power absorption needs p > 1, got {p}")
    return AbsorptionTerm(
        lambda u: np.power(u, p),
        lambda u: p * np.power(u, p - 1.0),
        superlinear_limit=np.inf,
        family="power",
        params={"p": p},
    )


def saturating_absorption(k):
    """f(u) = u^2 / (1 + k u).

    Vanishes to second order at 0 and f(u)/u increases, but f(u)/u stays
    below 1/k, so no constant supersolution exists once sup|V| >= 1/k.
    """
    k = float(k)
    if not k > 0.0:
        raise ValueError(f"saturating absorption needs k > 0, got {k}")
    return AbsorptionTerm(
        lambda u: u * u / (1.0 + k * u),
        lambda u: u * (2.0 + k * u) / (1.0 + k * u) ** 2,
        superlinear_limit=1.0 / k,
        family="saturating",
        params={"k": k},
    )


# -- reports -----------------------------------------------------------------

@dataclass
class Check:
    name: str
    status: str
    detail: str = ""
    witness: dict = field(default_factory=dict)

    def to_dict(self):
        return {"name": self.name, "status": self.status, "detail": self.detail,
                "witness": self.witness}


@dataclass
class ValidationReport:
    subject: str
    checks: list
    check_grid: np.ndarray = field(repr=False)

    @property
    def passed(self):
        """True when no checkable hypothesis failed."""
        return all(c.status != FAIL for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "check_grid": {"min": float(self.check_grid[0]),
                           "max": float(self.check_grid[-1]),
                           "size": int(self.check_grid.size), "spacing": "log"},
        }


def _status(ok):
    return PASS if ok else FAIL


def validate_potential(potential, check_grid=None, r_max=1e3):
    """Sample the hypotheses on V: boundedness, V+ != 0, the decay bound, behaviour at 0.

    Never raises; the returned report says which checks hold.
    """
    if check_grid is None:
        check_grid = np.geomspace(1e-4, r_max, 4001)
    r = np.asarray(check_grid, dtype=float)
    v = potential(r)
    vplus = np.maximum(v, 0.0)
    vminus = np.maximum(-v, 0.0)
    checks = []

    finite = bool(np.all(np.isfinite(v)))
    sup = float(np.max(np.abs(v))) if finite else float("inf")
    if potential.sup_norm is not None:
        sup = max(sup, float(potential.sup_norm))
    checks.append(Check("bounded", _status(finite), "V in L-infinity on the check grid",
                        {"sup_norm": sup}))

    split_err = float(np.max(np.abs(vplus - vminus - v))) if finite else float("inf")
    disjoint = bool(np.all(vplus * vminus == 0.0))
    checks.append(Check("sign_split", _status(split_err == 0.0 and disjoint),
                        "V = V+ - V- with V+ V- = 0", {"max_error": split_err}))

    checks.append(Check("positive_part_nonzero", _status(bool(np.any(vplus > 0.0))),
                        "V+ is not identically zero",
                        {"max_positive": float(np.max(vplus))}))

    if potential.decay_bound is None:
        checks.append(Check("decay_bound", NOT_CHECKABLE, "no (A, alpha) declared"))
    else:
        amp, alpha = potential.decay_bound
        scaled = vplus * r ** (2.0 + alpha)
        worst = float(np.max(scaled))
        ok = amp > 0 and alpha > 0 and worst <= amp * (1.0 + 1e-12)
        checks.append(Check("decay_bound", _status(ok),
                            f"V+(r) r^(2+alpha) <= A with A={amp}, alpha={alpha}",
                            {"max_scaled": worst, "margin": amp - worst,
                             "argmax_r": float(r[np.argmax(scaled)])}))

    core = np.abs(v[r <= 1e-2]) if np.any(r <= 1e-2) else np.abs(v[:1])
    checks.append(Check("bounded_at_origin", _status(bool(np.all(np.isfinite(core)))),
                        "V bounded near 0, so |x|^(2(N-1)/N) V(x) -> 0 there",
                        {"max_near_origin": float(np.max(core))}))

    checks.append(Check("split_L_N_over_2", NOT_CHECKABLE,
                        "the split V+ = V1 + V2 with V1 in L^(N/2) is not materialised"))
    return ValidationReport("potential", checks, r)


def supersolution_bound(f, sup_norm_v):
    """Smallest M in {1, 2, 4, ...} with f(M)/M > sup_norm_v.

    Raises:
        HypothesisViolation: when the doubling search passes 2**64.
    """
    m = 1.0
    while m <= SUPERSOLUTION_SEARCH_LIMIT:
        with np.errstate(over="ignore", invalid="ignore"):
            ratio = float(f(np.array([m]))[0]) / m
        if ratio > sup_norm_v:
            return m
        m *= 2.0
    raise HypothesisViolation(
        f"no M <= 2^64 with f(M)/M > {sup_norm_v}: f grows too slowly"
    )


def validate_absorption(f, sup_norm_v, small_floor=1e-6, u_max=1e6):
    """Sample the hypotheses on f: f(0) = f'(0) = 0, f'(u)/u bounded below near 0,
    f(u)/u strictly increasing, and f(M)/M > sup_norm_v for some M.
    """
    checks = []
    f0 = float(f(np.array([0.0]))[0])
    fp0 = float(f.prime(np.array([0.0]))[0])
    checks.append(Check("f1_origin", _status(abs(f0) <= 1e-14 and abs(fp0) <= 1e-14),
                        "f(0) = f'(0) = 0", {"f0": f0, "fprime0": fp0}))

    small = np.geomspace(1e-12, 1e-3, 200)
    ratio = f.prime(small) / small
    a = float(np.min(ratio))
    checks.append(Check("f1_liminf", _status(np.isfinite(a) and a >= small_floor),
                        "f'(u)/u >= a > 0 for small u", {"a": a, "floor": small_floor}))

    u = np.geomspace(1e-6, u_max, 2001)
    with np.errstate(over="ignore", invalid="ignore"):
        q = f(u) / u
    increasing = bool(np.all(np.isfinite(q)) and np.all(np.diff(q) > 0.0))
    checks.append(Check("f2_increasing", _status(increasing),
                        "f(u)/u strictly increasing on the sample grid"))

    try:
        m = supersolution_bound(f, sup_norm_v)
        checks.append(Check("f3_superlinear", PASS, "f(M)/M exceeds sup|V|",
                            {"M": m, "sup_norm_V": float(sup_norm_v)}))
    except HypothesisViolation as exc:
        checks.append(Check("f3_superlinear", FAIL, str(exc),
                            {"sup_norm_V": float(sup_norm_v)}))
    return ValidationReport("absorption", checks, u)
