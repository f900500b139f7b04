"""Scale-family baseline distributions and their hazard shape checks.

Each baseline carries a ``scale`` λ and represents the law with CDF
``x -> F(λ x)``.  Families implement unit-scale primitives in log form
(``_log_cdf0``, ``_log_sf0``) so that both tails stay accurate; the public
methods apply the scale.  Array inputs give NaN where a quantity is undefined;
scalar inputs raise :class:`EvaluationError` instead.
"""

from __future__ import annotations

import dataclasses
import enum
import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EvaluationError, InvalidInput
from .numerics import (
    DEFAULT_GRID_COUNT,
    Curvature,
    Direction,
    Grid,
    ShapeVerdict,
    Spacing,
    check_convex,
    check_dominance,
    check_monotone,
    derivative,
    evaluate,
    find_root,
    integrate,
    make_grid,
)

TAIL_PROB = 1e-4
DENSITY_TOL = 1e-6
_EDGE_NUDGE = 1e-9
_ELASTICITY_STEP = 1e-3


class BaselineFamily(enum.Enum):
    EXPONENTIAL = "exponential"
    KUMMER = "kummer"
    LOMAX_HALF = "lomax_half"
    POWER = "power"
    PARETO = "pareto"
    CUSTOM = "custom"


class BaselineShape(enum.Enum):
    R_DECREASING = "r_decreasing"
    R_INCREASING = "r_increasing"
    RT_DECREASING = "rt_decreasing"
    XR_DECREASING = "xr_decreasing"
    XR_CONVEX = "xr_convex"
    XRT_INCREASING = "xrt_increasing"
    XRT_CONVEX = "xrt_convex"
    ELASTICITY_RT_DECREASING = "elasticity_rt_decreasing"
    ELASTICITY_R_DECREASING = "elasticity_r_decreasing"
    XR_DECREASING_STAR = "xr_decreasing_star"


class HazardComparison(enum.Enum):
    HAZARD_LEQ = "hazard_leq"
    REV_HAZARD_LEQ = "rev_hazard_leq"
    CDF_LEQ = "cdf_leq"


def _log1mexp(a):
    """``log(1 - exp(a))`` for ``a <= 0``."""
    a = np.asarray(a, dtype=float)
    with np.errstate(all="ignore"):
        return np.where(a > -math.log(2.0), np.log(-np.expm1(a)), np.log1p(-np.exp(a)))


class Baseline:
    """Common scaled interface; subclasses are frozen dataclasses."""

    family: BaselineFamily
    scale: float

    # unit-scale primitives ---------------------------------------------
    def _support0(self) -> tuple[float, float]:
        return 0.0, math.inf

    def _log_cdf0(self, y):
        raise NotImplementedError

    def _log_sf0(self, y):
        raise NotImplementedError

    def _pdf0(self, y):
        raise NotImplementedError

    def _hazard0(self, y):
        return self._pdf0(y) / np.exp(self._log_sf0(y))

    def _rev_hazard0(self, y):
        return self._pdf0(y) / np.exp(self._log_cdf0(y))

    def _quantile0(self, u):
        raise NotImplementedError

    def _isf0(self, v):
        return self._quantile0(1.0 - v)

    def params(self) -> tuple:
        return ()

    # helpers -------------------------------------------------------------
    def _check_scale(self):
        s = float(self.scale)
        if not math.isfinite(s) or s <= 0:
            raise InvalidInput(f"scale must be positive, got {self.scale!r}")
        object.__setattr__(self, "scale", s)

    def _apply(self, fn, x, where_defined, name):
        arr = np.asarray(x, dtype=float)
        y = arr * self.scale
        lo, hi = self._support0()
        with np.errstate(all="ignore"):
            out = np.asarray(fn(y, lo, hi), dtype=float)
        if where_defined:
            ok = (y > lo) & (y < hi)
            out = np.where(ok & np.isfinite(out), out, np.nan)
        if arr.ndim == 0:
            val = float(out)
            if math.isnan(val):
                raise EvaluationError(f"{name} undefined at x={float(arr)!r} for {self.describe()}")
            return val
        return out

    # public interface ------------------------------------------------------
    def support(self) -> tuple[float, float]:
        lo, hi = self._support0()
        return lo / self.scale, hi / self.scale

    def scaled(self, lam: float) -> "Baseline":
        lam = float(lam)
        if not math.isfinite(lam) or lam <= 0:
            raise InvalidInput(f"scale factor must be positive, got {lam!r}")
        return dataclasses.replace(self, scale=self.scale * lam)

    def unit(self) -> "Baseline":
        return dataclasses.replace(self, scale=1.0)

    def log_cdf(self, x):
        def fn(y, lo, hi):
            inside = self._log_cdf0(np.clip(y, lo, hi))
            return np.where(y <= lo, -np.inf, np.where(y >= hi, 0.0, inside))
        return self._apply(fn, x, False, "log_cdf")

    def log_sf(self, x):
        def fn(y, lo, hi):
            inside = self._log_sf0(np.clip(y, lo, hi))
            return np.where(y <= lo, 0.0, np.where(y >= hi, -np.inf, inside))
        return self._apply(fn, x, False, "log_sf")

    def cdf(self, x):
        out = np.exp(self.log_cdf(x))
        return float(out) if np.ndim(out) == 0 else out

    def sf(self, x):
        out = np.exp(self.log_sf(x))
        return float(out) if np.ndim(out) == 0 else out

    def pdf(self, x):
        return self._apply(lambda y, lo, hi: self.scale * self._pdf0(y), x, True, "pdf")

    def hazard(self, x):
        """``r(x) = f(x) / (1 - F(x))`` on the open support."""
        return self._apply(lambda y, lo, hi: self.scale * self._hazard0(y), x, True, "hazard")

    def rev_hazard(self, x):
        """``r~(x) = f(x) / F(x)`` on the open support."""
        return self._apply(lambda y, lo, hi: self.scale * self._rev_hazard0(y), x, True,
                           "rev_hazard")

    def quantile(self, u):
        """``inf {x : F(x) >= u}``, clamped to the support."""
        return self._inverse(self._quantile0, u)

    def isf(self, v):
        """Inverse survival function: the ``x`` with ``1 - F(x) = v``."""
        return self._inverse(self._isf0, v)

    def _inverse(self, fn, p):
        arr = np.asarray(p, dtype=float)
        lo, hi = self._support0()
        with np.errstate(all="ignore"):
            out = np.clip(np.asarray(fn(arr), dtype=float), lo, hi) / self.scale
        out = np.where((arr >= 0) & (arr <= 1), out, np.nan)
        return float(out) if arr.ndim == 0 else out

    def same_law(self, other: "Baseline") -> bool:
        """Same unit-scale law (scales ignored)."""
        if self.family is BaselineFamily.CUSTOM or other.family is BaselineFamily.CUSTOM:
            return (self.family is other.family and self.cdf_fn is other.cdf_fn
                    and self._support0() == other._support0())
        return self.family is other.family and self.params() == other.params()

    def describe(self) -> str:
        args = ",".join(f"{p:g}" for p in self.params())
        base = f"{self.family.value}({args})" if args else self.family.value
        return base if self.scale == 1.0 else f"{base}*{self.scale:g}"

    def default_grid(self, count: int = DEFAULT_GRID_COUNT) -> Grid:
        lo = float(self.quantile(TAIL_PROB))
        hi = float(self.isf(TAIL_PROB))
        return make_grid(*_inside(lo, hi, self.support()), count, Spacing.LOG)


def _inside(lo, hi, support):
    """Shrink ``[lo, hi]`` into the open support by a relative nudge."""
    slo, shi = support
    lo = max(lo, slo * (1 + _EDGE_NUDGE)) if slo > 0 else max(lo, 1e-300)
    hi = min(hi, shi * (1 - _EDGE_NUDGE))
    if not lo < hi:
        raise InvalidInput(f"empty evaluation range [{lo}, {hi}]")
    return lo, hi


@functools.lru_cache(maxsize=256)
def _density_mass(b: Baseline) -> float:
    """∫ f over the central ``1 - 2e-9`` probability range, in log-x coordinates."""
    lo, hi = float(b.quantile(1e-9)), float(b.isf(1e-9))
    return integrate(lambda t: b.pdf(np.exp(t)) * np.exp(t), math.log(lo), math.log(hi))


def validate_density(b: Baseline) -> None:
    mass = _density_mass(b)
    if abs(mass - (1.0 - 2e-9)) > DENSITY_TOL:
        raise InvalidInput(f"density of {b.describe()} integrates to {mass!r}, not 1")


@dataclass(frozen=True)
class Exponential(Baseline):
    """``F(x) = 1 - exp(-x)``."""

    scale: float = 1.0
    family = BaselineFamily.EXPONENTIAL

    def __post_init__(self):
        self._check_scale()

    def _log_cdf0(self, y):
        return _log1mexp(-y)

    def _log_sf0(self, y):
        return -y

    def _pdf0(self, y):
        return np.exp(-y)

    def _hazard0(self, y):
        return np.ones_like(y)

    def _rev_hazard0(self, y):
        return 1.0 / np.expm1(y)

    def _quantile0(self, u):
        return -np.log1p(-u)

    def _isf0(self, v):
        return -np.log(v)


@dataclass(frozen=True)
class Kummer(Baseline):
    """``F(x) = 1 - exp(1 - (1 + x**2)**(1/5))``."""

    scale: float = 1.0
    family = BaselineFamily.KUMMER

    def __post_init__(self):
        self._check_scale()

    @staticmethod
    def _t(y):
        return np.expm1(0.2 * np.log1p(y * y))

    @staticmethod
    def _dt(y):
        return 0.4 * y * np.exp(-0.8 * np.log1p(y * y))

    def _log_cdf0(self, y):
        return _log1mexp(-self._t(y))

    def _log_sf0(self, y):
        return -self._t(y)

    def _pdf0(self, y):
        return np.exp(-self._t(y)) * self._dt(y)

    def _hazard0(self, y):
        return self._dt(y)

    def _rev_hazard0(self, y):
        return self._dt(y) / np.expm1(self._t(y))

    def _quantile0(self, u):
        return self._from_t(-np.log1p(-u))

    def _isf0(self, v):
        return self._from_t(-np.log(v))

    @staticmethod
    def _from_t(t):
        return np.sqrt(np.expm1(5.0 * np.log1p(t)))


@dataclass(frozen=True)
class LomaxHalf(Baseline):
    """``F(x) = 1 - (1 + 2x)**(-1/2)``."""

    scale: float = 1.0
    family = BaselineFamily.LOMAX_HALF

    def __post_init__(self):
        self._check_scale()

    def _log_cdf0(self, y):
        return _log1mexp(self._log_sf0(y))

    def _log_sf0(self, y):
        return -0.5 * np.log1p(2.0 * y)

    def _pdf0(self, y):
        return np.power(1.0 + 2.0 * y, -1.5)

    def _hazard0(self, y):
        return 1.0 / (1.0 + 2.0 * y)

    def _quantile0(self, u):
        return 0.5 * np.expm1(-2.0 * np.log1p(-u))

    def _isf0(self, v):
        return 0.5 * np.expm1(-2.0 * np.log(v))


@dataclass(frozen=True)
class Power(Baseline):
    """``F(x) = (x/a)**l`` on ``(0, a]``."""

    a: float
    l: float
    scale: float = 1.0
    family = BaselineFamily.POWER

    def __post_init__(self):
        self._check_scale()
        if not (self.a > 0 and self.l > 0 and math.isfinite(self.a) and math.isfinite(self.l)):
            raise InvalidInput("power baseline needs a > 0 and l > 0")

    def params(self):
        return (float(self.a), float(self.l))

    def _support0(self):
        return 0.0, float(self.a)

    def _log_cdf0(self, y):
        return self.l * np.log(y / self.a)

    def _log_sf0(self, y):
        return _log1mexp(self._log_cdf0(y))

    def _pdf0(self, y):
        return self.l / self.a * np.power(y / self.a, self.l - 1.0)

    def _rev_hazard0(self, y):
        return self.l / y

    def _quantile0(self, u):
        return self.a * np.power(u, 1.0 / self.l)

    def _isf0(self, v):
        return self.a * np.exp(np.log1p(-v) / self.l)


@dataclass(frozen=True)
class Pareto(Baseline):
    """``F(x) = 1 - (x/b)**(-a)`` on ``[b, inf)``."""

    a: float
    b: float
    scale: float = 1.0
    family = BaselineFamily.PARETO

    def __post_init__(self):
        self._check_scale()
        if not (self.a > 0 and self.b > 0 and math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidInput("pareto baseline needs a > 0 and b > 0")

    def params(self):
        return (float(self.a), float(self.b))

    def _support0(self):
        return float(self.b), math.inf

    def _log_cdf0(self, y):
        return _log1mexp(self._log_sf0(y))

    def _log_sf0(self, y):
        return -self.a * np.log(y / self.b)

    def _pdf0(self, y):
        return self.a / self.b * np.power(y / self.b, -self.a - 1.0)

    def _hazard0(self, y):
        return self.a / y

    def _quantile0(self, u):
        return self.b * np.exp(-np.log1p(-u) / self.a)

    def _isf0(self, v):
        return self.b * np.power(v, -1.0 / self.a)


@dataclass(frozen=True, eq=False)
class CustomBaseline(Baseline):
    """User CDF on ``support``; density and quantiles fall back to numerics."""

    cdf_fn: Callable[[float], float]
    lower: float = 0.0
    upper: float = math.inf
    pdf_fn: Callable[[float], float] | None = None
    scale: float = 1.0
    family = BaselineFamily.CUSTOM

    def __post_init__(self):
        self._check_scale()
        if not (0 <= self.lower < self.upper):
            raise InvalidInput("custom support must satisfy 0 <= lo < hi")
        if self.scale == 1.0:
            validate_density(self)

    def _support0(self):
        return float(self.lower), float(self.upper)

    def _cdf_values(self, y):
        return np.clip(evaluate(self.cdf_fn, y), 0.0, 1.0)

    def _log_cdf0(self, y):
        return np.log(self._cdf_values(y))

    def _log_sf0(self, y):
        return np.log1p(-self._cdf_values(y))

    def _pdf0(self, y):
        y = np.asarray(y, dtype=float)
        if self.pdf_fn is not None:
            return evaluate(self.pdf_fn, y)
        return derivative(lambda t: self._cdf_values(np.asarray(t, dtype=float)), y)

    def _solve(self, u):
        lo, hi = self._support0()
        if not math.isfinite(hi):
            hi = max(1.0, 2 * lo)
            while float(self._cdf_values(hi)) < u:
                hi *= 2.0
                if hi > 1e300:
                    raise EvaluationError(f"custom cdf never reaches {u!r}")
        return find_root(lambda t: float(self._cdf_values(t)) - u, lo, hi)

    def _quantile0(self, u):
        u = np.asarray(u, dtype=float)
        flat = [self._solve(v) if 0 < v < 1 else math.nan for v in u.ravel()]
        return np.array(flat).reshape(u.shape)


def make_baseline(family, params=()) -> Baseline:
    """Named-family constructor used by scenario files."""
    fam = BaselineFamily(family) if not isinstance(family, BaselineFamily) else family
    params = tuple(float(p) for p in params)
    expected = {BaselineFamily.EXPONENTIAL: 0, BaselineFamily.KUMMER: 0,
                BaselineFamily.LOMAX_HALF: 0, BaselineFamily.POWER: 2, BaselineFamily.PARETO: 2}
    if fam is BaselineFamily.CUSTOM:
        raise InvalidInput("custom baselines are built with CustomBaseline(cdf)")
    if len(params) != expected[fam]:
        raise InvalidInput(f"{fam.value} takes {expected[fam]} parameters, got {len(params)}")
    cls = {BaselineFamily.EXPONENTIAL: Exponential, BaselineFamily.KUMMER: Kummer,
           BaselineFamily.LOMAX_HALF: LomaxHalf, BaselineFamily.POWER: Power,
           BaselineFamily.PARETO: Pareto}[fam]
    b = cls(*params)
    validate_density(b)
    return b


def _elasticity(fn: Callable) -> Callable:
    """``x g'(x) / g(x)`` as the derivative of ``ln g`` in ``ln x`` (5-point stencil)."""
    h = _ELASTICITY_STEP

    def lg(t):
        with np.errstate(all="ignore"):
            return np.log(evaluate(fn, np.exp(t)))

    def f(x):
        t = np.log(np.asarray(x, dtype=float))
        return (lg(t - 2 * h) - 8 * lg(t - h) + 8 * lg(t + h) - lg(t + 2 * h)) / (12 * h)
    return f


def shape_function(b: Baseline, which: BaselineShape) -> Callable:
    which = BaselineShape(which)
    if which in (BaselineShape.R_DECREASING, BaselineShape.R_INCREASING):
        return b.hazard
    if which is BaselineShape.RT_DECREASING:
        return b.rev_hazard
    if which in (BaselineShape.XR_DECREASING, BaselineShape.XR_CONVEX,
                 BaselineShape.XR_DECREASING_STAR):
        return lambda x: x * b.hazard(x)
    if which in (BaselineShape.XRT_INCREASING, BaselineShape.XRT_CONVEX):
        return lambda x: x * b.rev_hazard(x)
    if which is BaselineShape.ELASTICITY_RT_DECREASING:
        return _elasticity(b.rev_hazard)
    return _elasticity(b.hazard)


def check_baseline_shape(b: Baseline, which: BaselineShape,
                         grid: Grid | None = None) -> ShapeVerdict:
    """Monotone or convex check of the named hazard functional."""
    which = BaselineShape(which)
    grid = b.default_grid() if grid is None else grid
    f = shape_function(b, which)
    if which in (BaselineShape.XR_CONVEX, BaselineShape.XRT_CONVEX):
        return check_convex(f, grid, Curvature.CONVEX)
    increasing = which in (BaselineShape.R_INCREASING, BaselineShape.XRT_INCREASING)
    return check_monotone(f, grid, Direction.INCREASING if increasing else Direction.DECREASING)


def pair_grid(b1: Baseline, b2: Baseline, count: int = DEFAULT_GRID_COUNT) -> Grid:
    """LOG grid over the union of both central ranges, inside both supports."""
    lo = min(float(b1.quantile(TAIL_PROB)), float(b2.quantile(TAIL_PROB)))
    hi = max(float(b1.isf(TAIL_PROB)), float(b2.isf(TAIL_PROB)))
    s1, s2 = b1.support(), b2.support()
    support = (max(s1[0], s2[0]), min(s1[1], s2[1]))
    return make_grid(*_inside(max(lo, support[0]), min(hi, support[1]), support),
                     count, Spacing.LOG)


def compare_hazards(b1: Baseline, b2: Baseline, mode: HazardComparison,
                    grid: Grid | None = None) -> ShapeVerdict:
    """Pointwise ``q1 <= q2`` for the hazard, reversed hazard or CDF."""
    mode = HazardComparison(mode)
    grid = pair_grid(b1, b2) if grid is None else grid
    attr = {HazardComparison.HAZARD_LEQ: "hazard", HazardComparison.REV_HAZARD_LEQ: "rev_hazard",
            HazardComparison.CDF_LEQ: "cdf"}[mode]
    return check_dominance(getattr(b1, attr), getattr(b2, attr), grid)
