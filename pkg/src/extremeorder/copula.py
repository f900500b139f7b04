"""Archimedean generators and the generator-shape checks used as hypotheses.

A generator is held in log form: ``log_psi`` and its first two derivatives
``dlog_psi`` and ``d2log_psi`` are the primitives, together with
``phi_neglog(s) = phi(exp(-s))`` which inverts ``psi`` without ever forming
probabilities that underflow.  ``psi``, ``psi_prime`` and ``phi`` are derived
from them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CapError, EvaluationError, InvalidInput
from .numerics import (
    Curvature,
    Direction,
    Grid,
    ShapeVerdict,
    SHAPE_SLACK,
    Spacing,
    Status,
    check_convex,
    check_monotone,
    derivative,
    evaluate,
    find_root,
    make_grid,
)

U_MIN = 1e-300
S_MAX = -math.log(U_MIN)
GRID_U_LO = 1e-10
SUPER_ADDITIVE_POINTS = 64


class Family(enum.Enum):
    GUMBEL_EXP = "gumbel_exp"
    LOG_EXP = "log_exp"
    INDEPENDENCE = "independence"
    CUSTOM = "custom"


class RatioKind(enum.Enum):
    PSI_OVER_DPSI = "psi_over_dpsi"
    ONE_MINUS_PSI_OVER_DPSI = "one_minus_psi_over_dpsi"
    PRODUCT_RULE_TERM = "product_rule_term"
    RATIO_OF_DERIVATIVES = "ratio_of_derivatives"


class Shape(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    CONVEX = "convex"
    CONCAVE = "concave"


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _out(values, scalar):
    return float(values) if scalar else values


class Generator:
    """Base class; subclasses supply the log-form primitives."""

    family: Family
    theta: float | None

    # primitives ---------------------------------------------------------
    def _log_psi(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _dlog_psi(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _d2log_psi(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _phi_neglog(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # public, vectorised -------------------------------------------------
    def _call(self, fn, x):
        arr, scalar = _as_array(x)
        with np.errstate(all="ignore"):
            res = fn(np.where(arr < 0, np.nan, arr))
        return _out(res, scalar)

    def log_psi(self, x):
        return self._call(self._log_psi, x)

    def dlog_psi(self, x):
        """``(ln psi)'(x) = psi'(x) / psi(x)``."""
        return self._call(self._dlog_psi, x)

    def d2log_psi(self, x):
        return self._call(self._d2log_psi, x)

    def psi(self, x):
        return self._call(lambda a: np.exp(self._log_psi(a)), x)

    def one_minus_psi(self, x):
        return self._call(lambda a: -np.expm1(self._log_psi(a)), x)

    def psi_prime(self, x):
        return self._call(lambda a: np.exp(self._log_psi(a)) * self._dlog_psi(a), x)

    def phi_neglog(self, s):
        """``phi(exp(-s))`` for ``s >= 0``, accurate for both tails."""
        return self._call(self._phi_neglog, s)

    def phi(self, u):
        """Inverse of ``psi`` on ``(U_MIN, 1]``."""
        arr, scalar = _as_array(u)
        if np.any(np.isnan(arr)) or np.any(arr > 1):
            raise InvalidInput("phi is defined for u in (0, 1]")
        if np.any(arr <= U_MIN):
            raise CapError(f"phi argument below the cap {U_MIN:g}")
        with np.errstate(all="ignore"):
            res = self._phi_neglog(-np.log(arr))
        return _out(np.where(arr == 1.0, 0.0, res), scalar)

    def same_as(self, other: "Generator") -> bool:
        if self.family is Family.CUSTOM or other.family is Family.CUSTOM:
            return self is other
        return self.family is other.family and self.theta == other.theta

    def describe(self) -> str:
        if self.theta is None:
            return self.family.value
        return f"{self.family.value}({self.theta:g})"


@dataclass(frozen=True, eq=True)
class GumbelExp(Generator):
    """``psi(x) = exp(-x**(1/theta))`` with ``theta >= 1``."""

    theta: float
    family: Family = field(default=Family.GUMBEL_EXP, init=False)

    def __post_init__(self):
        t = float(self.theta)
        if not math.isfinite(t) or t < 1:
            raise InvalidInput(f"gumbel_exp needs theta >= 1, got {self.theta!r}")
        object.__setattr__(self, "theta", t)

    def _log_psi(self, x):
        return -np.power(x, 1.0 / self.theta)

    def _dlog_psi(self, x):
        k = 1.0 / self.theta
        return -k * np.power(x, k - 1.0)

    def _d2log_psi(self, x):
        k = 1.0 / self.theta
        return -k * (k - 1.0) * np.power(x, k - 2.0)

    def _phi_neglog(self, s):
        return np.power(s, self.theta)


@dataclass(frozen=True, eq=True)
class LogExp(Generator):
    """``psi(x) = exp((1 - e**x) / theta)``.

    Convexity of ``psi`` at the origin requires ``theta <= 1``; this is
    enforced by a decreasing/convex spot check at construction.
    """

    theta: float
    family: Family = field(default=Family.LOG_EXP, init=False)

    def __post_init__(self):
        t = float(self.theta)
        if not math.isfinite(t) or t <= 0:
            raise InvalidInput(f"log_exp needs theta > 0, got {self.theta!r}")
        object.__setattr__(self, "theta", t)
        grid = generator_grid(self, 400)
        dec = check_monotone(self.psi, grid, Direction.DECREASING)
        cvx = check_convex(self.psi, grid, Curvature.CONVEX)
        if not (dec.passed and cvx.passed):
            raise InvalidInput(
                f"log_exp({t:g}) is not a valid generator: psi must be decreasing "
                f"and convex (fails near x={cvx.witness if cvx.failed else dec.witness})")

    def _log_psi(self, x):
        return -np.expm1(x) / self.theta

    def _dlog_psi(self, x):
        return -np.exp(x) / self.theta

    def _d2log_psi(self, x):
        return -np.exp(x) / self.theta

    def _phi_neglog(self, s):
        return np.log1p(self.theta * s)


@dataclass(frozen=True, eq=True)
class Independence(Generator):
    """``psi(x) = exp(-x)``: the product copula."""

    theta: None = field(default=None, init=False)
    family: Family = field(default=Family.INDEPENDENCE, init=False)

    def _log_psi(self, x):
        return -x

    def _dlog_psi(self, x):
        return np.full_like(x, -1.0)

    def _d2log_psi(self, x):
        return np.zeros_like(x)

    def _phi_neglog(self, s):
        return np.asarray(s, dtype=float).copy()


class CustomGenerator(Generator):
    """User-supplied ``psi``; the inverse and derivatives are numeric."""

    family = Family.CUSTOM
    theta = None

    def __init__(self, psi: Callable[[float], float], name: str = "custom"):
        self._user_psi = psi
        self.name = name
        try:
            at0 = float(psi(0.0))
        except Exception as exc:  # user code: any failure is a validation error
            raise InvalidInput(f"custom psi fails at 0: {exc}") from exc
        if abs(at0 - 1.0) > 1e-12:
            raise InvalidInput(f"custom psi must satisfy psi(0) = 1, got {at0!r}")
        grid = make_grid(1e-6, 50.0, 200, Spacing.LOG)
        vals = evaluate(psi, grid.points)
        if np.any(np.isnan(vals)) or np.any((vals < 0) | (vals > 1)):
            raise InvalidInput("custom psi must take values in [0, 1]")
        if check_monotone(vals, grid, Direction.DECREASING).failed:
            raise InvalidInput("custom psi must be nonincreasing")

    def __repr__(self):
        return f"CustomGenerator({self.name!r})"

    def describe(self) -> str:
        return f"custom:{self.name}"

    def _psi_values(self, x):
        return evaluate(self._user_psi, x)

    def _log_psi(self, x):
        return np.log(self._psi_values(x))

    def _dlog_psi(self, x):
        return derivative(lambda t: np.log(self._psi_values(np.asarray(t, dtype=float))),
                          np.asarray(x, dtype=float))

    def _d2log_psi(self, x):
        return derivative(lambda t: np.log(self._psi_values(np.asarray(t, dtype=float))),
                          np.asarray(x, dtype=float), order=2)

    def _invert(self, u: float) -> float:
        if u >= 1.0:
            return 0.0
        hi = 1.0
        while float(self._user_psi(hi)) > u:
            hi *= 2.0
            if hi > 1e300:
                raise EvaluationError(f"custom psi never falls below {u!r}")
        return find_root(lambda t: float(self._user_psi(t)) - u, 0.0, hi)

    def _phi_neglog(self, s):
        s = np.asarray(s, dtype=float)
        flat = np.array([self._invert(math.exp(-v)) if np.isfinite(v) else np.nan
                         for v in s.ravel()])
        return flat.reshape(s.shape)


def make_generator(family, theta: float | None = None) -> Generator:
    """Named-family constructor used by scenario files."""
    fam = Family(family) if not isinstance(family, Family) else family
    if fam is Family.GUMBEL_EXP:
        return GumbelExp(_need_theta(fam, theta))
    if fam is Family.LOG_EXP:
        return LogExp(_need_theta(fam, theta))
    if fam is Family.INDEPENDENCE:
        return Independence()
    raise InvalidInput("custom generators are built with CustomGenerator(psi)")


def _need_theta(fam, theta):
    if theta is None:
        raise InvalidInput(f"{fam.value} needs a theta parameter")
    return float(theta)


def generator_grid(g: Generator, count: int = 2000) -> Grid:
    """LOG grid covering ``psi`` values from ``1 - 1e-10`` down to ``1e-10``."""
    lo = max(float(g.phi_neglog(-math.log1p(-GRID_U_LO))), 1e-290)
    hi = float(g.phi_neglog(-math.log(GRID_U_LO)))
    return make_grid(lo, hi, count, Spacing.LOG)


def _grid(g, grid):
    return generator_grid(g) if grid is None else grid


def check_log_convex(g: Generator, grid: Grid | None = None) -> ShapeVerdict:
    return check_convex(g.log_psi, _grid(g, grid), Curvature.CONVEX)


def check_log_concave(g: Generator, grid: Grid | None = None) -> ShapeVerdict:
    return check_convex(g.log_psi, _grid(g, grid), Curvature.CONCAVE)


def composition(outer: Generator, inner: Generator) -> Callable:
    """``t -> phi_outer(psi_inner(t))`` evaluated in log space."""
    def f(t):
        s = -np.asarray(inner.log_psi(t), dtype=float)
        return np.where(s >= S_MAX, np.nan, outer.phi_neglog(s))
    return f


def check_super_additive(outer: Generator, inner: Generator, grid: Grid | None = None,
                         slack: float = SHAPE_SLACK) -> ShapeVerdict:
    """``f(x) + f(y) <= f(x + y)`` for ``f = phi_outer o psi_inner`` on grid pairs."""
    pts = _grid(inner, grid).subsample(SUPER_ADDITIVE_POINTS).points
    f = composition(outer, inner)
    with np.errstate(all="ignore"):
        fx = np.asarray(f(pts), dtype=float)
        xs, ys = np.meshgrid(pts, pts, indexing="ij")
        upper = np.triu(np.ones_like(xs, dtype=bool))
        fxy = np.asarray(f(xs + ys), dtype=float)
    lhs = fx[:, None] + fx[None, :]
    ok_pts = np.isfinite(lhs) & np.isfinite(fxy) & upper
    excluded = int(upper.sum() - ok_pts.sum())
    scale = np.maximum(1.0, np.abs(fxy))
    gap = np.where(ok_pts, (fxy - lhs) / scale, np.inf)
    total = int(upper.sum())
    margin = float(gap.min()) if ok_pts.any() else math.nan
    if ok_pts.any() and margin < -slack:
        i, j = np.unravel_index(np.argmin(gap), gap.shape)
        return ShapeVerdict(Status.FAIL, witness=(float(pts[i]), float(pts[j])),
                            excluded_count=excluded, margin=margin, slack=slack)
    if not ok_pts.any() or excluded > 0.1 * total:
        return ShapeVerdict(Status.INCONCLUSIVE, excluded_count=excluded,
                            margin=margin, slack=slack)
    return ShapeVerdict(Status.PASS, excluded_count=excluded, margin=margin, slack=slack)


def ratio_function(g: Generator, which: RatioKind) -> Callable:
    """The named composite of ``psi`` and ``psi'`` as a vectorised function.

    With ``a = (ln psi)'``, ``b = (ln psi)''`` and ``s = -ln psi`` the
    composites reduce to ``psi/psi' = 1/a``, ``(1-psi)/psi' = expm1(s)/a`` and
    ``[(1-psi)/psi']' = -1 - expm1(s) (a**2 + b) / a**2``, which stay accurate
    where ``psi`` is near 0 or 1.
    """
    which = RatioKind(which)

    def parts(x):
        a = np.asarray(g.dlog_psi(x), dtype=float)
        b = np.asarray(g.d2log_psi(x), dtype=float)
        em = np.expm1(-np.asarray(g.log_psi(x), dtype=float))
        a = np.where(a == 0, np.nan, a)
        gval = em / a
        gprime = -1.0 - em * (a * a + b) / (a * a)
        return a, gval, gprime

    def f(x):
        with np.errstate(all="ignore"):
            a, gval, gprime = parts(x)
            if which is RatioKind.PSI_OVER_DPSI:
                return 1.0 / a
            if which is RatioKind.ONE_MINUS_PSI_OVER_DPSI:
                return gval
            if which is RatioKind.PRODUCT_RULE_TERM:
                return gval * gprime
            return gprime * a
    return f


def check_shape(f, grid: Grid, shape: Shape, slack: float = SHAPE_SLACK) -> ShapeVerdict:
    shape = Shape(shape)
    if shape is Shape.INCREASING:
        return check_monotone(f, grid, Direction.INCREASING, slack)
    if shape is Shape.DECREASING:
        return check_monotone(f, grid, Direction.DECREASING, slack)
    if shape is Shape.CONVEX:
        return check_convex(f, grid, Curvature.CONVEX, slack)
    return check_convex(f, grid, Curvature.CONCAVE, slack)


def check_ratio_shape(g: Generator, which: RatioKind, prop: Shape,
                      grid: Grid | None = None) -> ShapeVerdict:
    return check_shape(ratio_function(g, which), _grid(g, grid), prop)


def d_monotone_warnings(g: Generator, d: int = 4, grid: Grid | None = None) -> list[str]:
    """Advisory low-order check of d-monotonicity; returns warning strings.

    Verifies ``psi >= 0``, ``psi' <= 0`` and, for ``d >= 3``, ``psi'' >= 0``;
    for ``d >= 4`` additionally ``psi''`` nonincreasing and convex.  Nothing
    here certifies the property.
    """
    grid = _grid(g, grid)
    x = grid.points
    warnings = []
    if np.any(np.asarray(g.psi(x)) < 0):
        warnings.append("psi takes negative values")
    if np.any(np.asarray(g.psi_prime(x)) > 0):
        warnings.append("psi' is positive somewhere")
    if d >= 3:
        second = derivative(g.psi_prime, x)
        if np.nanmin(second) < -SHAPE_SLACK:
            warnings.append("psi'' is negative somewhere (psi not convex)")
        if d >= 4:
            if check_monotone(second, grid, Direction.DECREASING).failed:
                warnings.append("psi'' is not nonincreasing")
            if check_convex(second, grid, Curvature.CONVEX).failed:
                warnings.append("psi'' is not convex")
    return warnings
