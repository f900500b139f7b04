"""Shared numeric kernels.

Everything the order and hypothesis checks reduce to lives here: evaluation
grids, central differences, grid-based monotonicity / convexity verdicts,
scalar and vectorised bisection, and adaptive Simpson quadrature.

Functions handed to the verdict helpers may be vectorised (accept and return
``numpy`` arrays) or scalar-only; :func:`evaluate` tries the array call first
and falls back to a point-by-point loop.  Points where evaluation fails or
is non-finite are *excluded* and counted, never fatal.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import (
    BracketError,
    EvaluationError,
    ExtremeOrderError,
    InvalidInput,
    QuadratureError,
)

SHAPE_SLACK = 1e-8
MAX_EXCLUDED_FRACTION = 0.10
DEFAULT_GRID_COUNT = 2000
MIN_GRID_COUNT = 2

QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-8
QUAD_MAX_LEVELS = 20
_QUAD_MAX_PANELS = 2_000_000

Witness = Union[float, tuple]

_EVAL_ERRORS = (ExtremeOrderError, ArithmeticError, ValueError, TypeError)


class Spacing(enum.Enum):
    LINEAR = "linear"
    LOG = "log"


class Direction(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


class Curvature(enum.Enum):
    CONVEX = "convex"
    CONCAVE = "concave"


class Status(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing, finite, positive evaluation points."""

    points: np.ndarray
    spacing: Spacing = Spacing.LOG

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).ravel()
        if pts.size < MIN_GRID_COUNT:
            raise InvalidInput(f"grid needs at least {MIN_GRID_COUNT} points")
        if not np.all(np.isfinite(pts)) or pts[0] <= 0:
            raise InvalidInput("grid points must be finite and positive")
        if np.any(np.diff(pts) <= 0):
            raise InvalidInput("grid points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def count(self) -> int:
        return self.points.size

    @property
    def lo(self) -> float:
        return float(self.points[0])

    @property
    def hi(self) -> float:
        return float(self.points[-1])

    def __len__(self):
        return self.count

    def subsample(self, count: int) -> "Grid":
        """Evenly spaced (by index) sub-grid keeping both endpoints."""
        if count >= self.count:
            return self
        idx = np.unique(np.round(np.linspace(0, self.count - 1, count)).astype(int))
        return Grid(self.points[idx], self.spacing)


def make_grid(lo: float, hi: float, count: int = DEFAULT_GRID_COUNT,
              spacing: Spacing = Spacing.LOG) -> Grid:
    """Grid with exactly ``count`` points from ``lo`` to ``hi`` inclusive."""
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not 0 < lo < hi:
        raise InvalidInput(f"grid bounds must satisfy 0 < lo < hi, got ({lo}, {hi})")
    if int(count) != count or count < MIN_GRID_COUNT:
        raise InvalidInput(f"grid count must be an integer >= {MIN_GRID_COUNT}")
    spacing = Spacing(spacing)
    if spacing is Spacing.LOG:
        pts = np.geomspace(lo, hi, int(count))
    else:
        pts = np.linspace(lo, hi, int(count))
    pts[0], pts[-1] = lo, hi
    return Grid(pts, spacing)


@dataclass(frozen=True)
class ShapeVerdict:
    """Outcome of a grid-based shape or dominance check.

    ``margin`` is the smallest normalised slack observed in the required
    direction: negative beyond ``-slack`` means a violation, and a value
    above ``10 * slack`` marks a verdict that is robust to float noise.
    """

    status: Status
    witness: Witness | None = None
    excluded_count: int = 0
    margin: float = math.nan
    slack: float = SHAPE_SLACK

    def __post_init__(self):
        if self.status is Status.FAIL and self.witness is None:
            raise InvalidInput("a FAIL verdict needs a witness")
        if self.status is Status.PASS and self.witness is not None:
            raise InvalidInput("a PASS verdict carries no witness")

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    @property
    def failed(self) -> bool:
        return self.status is Status.FAIL

    def robust(self, factor: float = 10.0) -> bool:
        return self.passed and self.margin > factor * self.slack

    @classmethod
    def from_bool(cls, ok: bool, witness: Witness = "relation violated",
                  margin: float | None = None) -> "ShapeVerdict":
        """Wrap an exact (non-grid) predicate; exact truths count as robust."""
        if ok:
            return cls(Status.PASS, margin=math.inf if margin is None else margin)
        return cls(Status.FAIL, witness=witness,
                   margin=-math.inf if margin is None else margin)


def either(*verdicts: ShapeVerdict) -> ShapeVerdict:
    """Disjunction: passes when any verdict passes (the best one is returned)."""
    passing = [v for v in verdicts if v.passed]
    if passing:
        return max(passing, key=lambda v: v.margin)
    failing = [v for v in verdicts if v.failed]
    if len(failing) == len(verdicts):
        return max(failing, key=lambda v: v.margin)
    return next(v for v in verdicts if v.status is Status.INCONCLUSIVE)


def both(*verdicts: ShapeVerdict) -> ShapeVerdict:
    """Conjunction: the worst verdict (FAIL before INCONCLUSIVE before PASS)."""
    rank = {Status.FAIL: 0, Status.INCONCLUSIVE: 1, Status.PASS: 2}
    return min(verdicts, key=lambda v: (rank[v.status], v.margin))


def evaluate(f: Callable, points) -> np.ndarray:
    """Evaluate ``f`` on ``points``; failures and non-finite values become NaN."""
    pts = np.asarray(points, dtype=float)
    try:
        with np.errstate(all="ignore"):
            out = np.asarray(f(pts), dtype=float)
        if out.shape == pts.shape:
            return np.where(np.isfinite(out), out, np.nan)
    except _EVAL_ERRORS:
        pass
    flat = pts.ravel()
    values = np.empty_like(flat)
    for i, x in enumerate(flat):
        try:
            with np.errstate(all="ignore"):
                v = float(f(float(x)))
        except _EVAL_ERRORS:
            v = math.nan
        values[i] = v if math.isfinite(v) else math.nan
    return values.reshape(pts.shape)


def derivative(f: Callable, x, order: int = 1):
    """Central-difference derivative of ``f`` at ``x`` (scalar or array).

    First order uses h = max(1e-6, 1e-6|x|); second order uses the 3-point
    stencil with h = max(1e-4, 1e-4|x|), the step that balances truncation
    against rounding for a second difference.  Scalar input raises
    :class:`EvaluationError` on a non-finite result; array input yields NaN.
    """
    if order not in (1, 2):
        raise InvalidInput("order must be 1 or 2")
    rel = 1e-6 if order == 1 else 1e-4
    xs = np.asarray(x, dtype=float)
    h = np.maximum(rel, rel * np.abs(xs))
    xp, xm = xs + h, xs - h
    h = (xp - xm) / 2.0
    if xs.ndim == 0:
        try:
            with np.errstate(all="ignore"):
                fp, fm = float(f(float(xp))), float(f(float(xm)))
                if order == 1:
                    val = (fp - fm) / (2.0 * h)
                else:
                    val = (fp - 2.0 * float(f(float(xs))) + fm) / (h * h)
        except _EVAL_ERRORS as exc:
            raise EvaluationError(f"cannot differentiate at x={float(xs)!r}: {exc}") from exc
        if not math.isfinite(val):
            raise EvaluationError(f"non-finite derivative at x={float(xs)!r}")
        return float(val)
    fp, fm = evaluate(f, xp), evaluate(f, xm)
    if order == 1:
        return (fp - fm) / (2.0 * h)
    return (fp - 2.0 * evaluate(f, xs) + fm) / (h * h)


def _values(f, grid: Grid) -> np.ndarray:
    if callable(f):
        return evaluate(f, grid.points)
    vals = np.asarray(f, dtype=float)
    if vals.shape != grid.points.shape:
        raise InvalidInput("value array does not match the grid")
    return np.where(np.isfinite(vals), vals, np.nan)


def _conclude(x_kept, normalised, total, kept, slack, witness_offset) -> ShapeVerdict:
    excluded = total - kept
    if normalised.size == 0:
        return ShapeVerdict(Status.INCONCLUSIVE, excluded_count=excluded, slack=slack)
    margin = float(normalised.min())
    bad = np.flatnonzero(normalised < -slack)
    if bad.size:
        return ShapeVerdict(Status.FAIL, witness=float(x_kept[bad[0] + witness_offset]),
                            excluded_count=excluded, margin=margin, slack=slack)
    if excluded > MAX_EXCLUDED_FRACTION * total:
        return ShapeVerdict(Status.INCONCLUSIVE, excluded_count=excluded,
                            margin=margin, slack=slack)
    return ShapeVerdict(Status.PASS, excluded_count=excluded, margin=margin, slack=slack)


def check_monotone(f, grid: Grid, direction: Direction,
                   slack: float = SHAPE_SLACK) -> ShapeVerdict:
    """Nonstrict monotonicity of ``f`` over ``grid``.

    A step violates the direction only beyond ``slack * max(1, |f|)``.
    ``f`` may also be an array of precomputed values on the grid.
    """
    vals = _values(f, grid)
    keep = np.isfinite(vals)
    xs, vs = grid.points[keep], vals[keep]
    sign = 1.0 if Direction(direction) is Direction.INCREASING else -1.0
    scale = np.maximum(1.0, np.maximum(np.abs(vs[:-1]), np.abs(vs[1:])))
    normalised = sign * np.diff(vs) / scale
    return _conclude(xs, normalised, grid.count, xs.size, slack, 1)


def check_convex(f, grid: Grid, sense: Curvature,
                 slack: float = SHAPE_SLACK) -> ShapeVerdict:
    """Convexity (or concavity) of ``f`` over ``grid`` via chord tests.

    For consecutive kept points x0 < x1 < x2 the value at x1 is compared with
    the chord through (x0, f0) and (x2, f2); on a uniform grid this is the
    second difference scaled by one half.
    """
    vals = _values(f, grid)
    keep = np.isfinite(vals)
    xs, vs = grid.points[keep], vals[keep]
    if xs.size < 3:
        return _conclude(xs, np.empty(0), grid.count, xs.size, slack, 1)
    x0, x1, x2 = xs[:-2], xs[1:-1], xs[2:]
    v0, v1, v2 = vs[:-2], vs[1:-1], vs[2:]
    w = (x2 - x1) / (x2 - x0)
    gap = w * v0 + (1.0 - w) * v2 - v1
    if Curvature(sense) is Curvature.CONCAVE:
        gap = -gap
    scale = np.maximum.reduce([np.ones_like(v0), np.abs(v0), np.abs(v1), np.abs(v2)])
    return _conclude(xs, gap / scale, grid.count, xs.size, slack, 1)


def check_dominance(lower, upper, grid: Grid, slack: float = SHAPE_SLACK) -> ShapeVerdict:
    """Pointwise ``lower(x) <= upper(x)`` on the grid, with relative slack."""
    lv, uv = _values(lower, grid), _values(upper, grid)
    keep = np.isfinite(lv) & np.isfinite(uv)
    xs, lv, uv = grid.points[keep], lv[keep], uv[keep]
    scale = np.maximum(1.0, np.maximum(np.abs(lv), np.abs(uv)))
    return _conclude(xs, (uv - lv) / scale, grid.count, xs.size, slack, 0)


def find_root(f: Callable[[float], float], lo: float, hi: float,
              max_iter: int = 200) -> float:
    """Bisection root of a continuous ``f`` with ``f(lo) * f(hi) <= 0``.

    Stops when |f(x)| <= 1e-12 * max(|f(lo)|, |f(hi)|) or the bracket width
    falls below 1e-14 |x|.
    """
    lo, hi = float(lo), float(hi)
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = float(f(lo)), float(f(hi))
    if not (math.isfinite(flo) and math.isfinite(fhi)):
        raise EvaluationError("non-finite function value at a bracket end")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={flo!r}, {fhi!r}")
    scale = max(abs(flo), abs(fhi))
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = float(f(mid))
        if not math.isfinite(fm):
            raise EvaluationError(f"non-finite function value at x={mid!r}")
        if fm == 0.0 or abs(fm) <= 1e-12 * scale or (hi - lo) <= 1e-14 * abs(mid):
            return mid
        if math.copysign(1.0, fm) == math.copysign(1.0, flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return mid


def invert_monotone(func: Callable[[np.ndarray], np.ndarray], target, lo, hi,
                    increasing: bool = True, max_iter: int = 200,
                    rtol: float = 1e-15) -> np.ndarray:
    """Vectorised bracketing solver for ``func(x) = target`` elementwise.

    ``lo``/``hi`` must bracket each solution of a monotone ``func``.  Steps
    are Illinois (modified regula falsi) updates in ``ln x`` for positive
    brackets, evaluated only where the bracket is still wide; whenever the
    interpolated point is not finite or leaves the bracket, a geometric
    bisection step is taken instead.
    """
    target = np.asarray(target, dtype=float)
    lo = np.array(np.broadcast_to(lo, target.shape), dtype=float)
    hi = np.array(np.broadcast_to(hi, target.shape), dtype=float)
    if np.any(~np.isfinite(hi)) or np.any(lo > hi):
        raise BracketError("bisection brackets must be finite with lo <= hi")
    sign = 1.0 if increasing else -1.0

    def resid(x):
        with np.errstate(all="ignore"):
            return sign * (np.asarray(func(x), dtype=float) - target)

    def coord(x, pos):
        with np.errstate(all="ignore"):
            return np.where(pos, np.log(np.where(pos, x, 1.0)), x)

    lo_f, hi_f, tgt_f = lo.ravel().copy(), hi.ravel().copy(), target.ravel()
    flo, fhi = np.ravel(resid(lo)).copy(), np.ravel(resid(hi)).copy()
    side = np.zeros(lo_f.shape, dtype=int)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            idx = np.flatnonzero(hi_f - lo_f > rtol * np.abs(hi_f))
            if idx.size == 0:
                break
            l, h, fl, fh = lo_f[idx], hi_f[idx], flo[idx], fhi[idx]
            pos = l > 0
            mid = np.where(pos, np.sqrt(l) * np.sqrt(h), 0.5 * (l + h))
            tl, th = coord(l, pos), coord(h, pos)
            t = th - fh * (th - tl) / (fh - fl)
            cand = np.where(pos, np.exp(t), t)
            frac = (t - tl) / (th - tl)
            x = np.where(np.isfinite(cand) & (frac > 0) & (frac < 1), cand, mid)
            val = sign * (np.asarray(func(x), dtype=float) - tgt_f[idx])
            right = val < 0
            exact = val == 0
            # Illinois: halve the stale end's residual when the same end moves twice
            stale_hi = right & (side[idx] == -1)
            stale_lo = ~right & (side[idx] == 1)
            flo[idx] = np.where(right, val, np.where(stale_lo, 0.5 * fl, fl))
            fhi[idx] = np.where(~right, val, np.where(stale_hi, 0.5 * fh, fh))
            side[idx] = np.where(right, -1, 1)
            lo_f[idx] = np.where(exact | right, x, l)
            hi_f[idx] = np.where(exact | ~right, x, h)
    lo, hi = lo_f.reshape(target.shape), hi_f.reshape(target.shape)
    return np.where(lo > 0, np.sqrt(lo) * np.sqrt(hi), 0.5 * (lo + hi))


def _vectorised(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def call(x):
        try:
            with np.errstate(all="ignore"):
                out = np.asarray(f(x), dtype=float)
            if out.shape == x.shape:
                return out
        except _EVAL_ERRORS:
            pass
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            try:
                out[i] = float(f(float(xi)))
            except _EVAL_ERRORS:
                out[i] = math.nan
        return out
    return call


def cumulative_integrate(f: Callable, points: Sequence[float], *,
                         abs_tol: float = QUAD_ABS_TOL, rel_tol: float = QUAD_REL_TOL,
                         max_levels: int = QUAD_MAX_LEVELS) -> np.ndarray:
    """Running integral of ``f`` from ``points[0]`` to each of ``points``.

    Adaptive composite Simpson refined level by level: every panel whose
    Simpson and two-half Simpson estimates disagree by more than its share
    of max(abs_tol, rel_tol * |I|) is halved.  Non-finite values at the two
    outer endpoints are replaced by the one-sided value at an offset of
    1e-10 of the interval width.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 1 or pts.size < 2 or not np.all(np.isfinite(pts)):
        raise InvalidInput("integration points must be a finite 1-d sequence of length >= 2")
    if np.any(np.diff(pts) <= 0):
        raise InvalidInput("integration points must be strictly increasing")
    fv = _vectorised(f)
    first, last = pts[0], pts[-1]
    width = last - first
    offset = 1e-10 * width

    def feval(x):
        v = fv(x)
        bad = ~np.isfinite(v)
        if bad.any():
            at_lo, at_hi = bad & (x == first), bad & (x == last)
            if at_lo.any():
                v[at_lo] = fv(x[at_lo] + offset)
            if at_hi.any():
                v[at_hi] = fv(x[at_hi] - offset)
            if not np.all(np.isfinite(v)):
                where = x[~np.isfinite(v)][0]
                raise QuadratureError(f"integrand is not finite at x={where!r}")
        return v

    a, b = pts[:-1].copy(), pts[1:].copy()
    owner = np.arange(a.size)
    fa, fb = feval(a), feval(b)
    fm = feval(0.5 * (a + b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    estimate = abs(whole.sum())
    result = np.zeros(a.size)
    for level in range(max_levels + 1):
        m = 0.5 * (a + b)
        fl, fr = feval(0.5 * (a + m)), feval(0.5 * (m + b))
        left = (m - a) / 6.0 * (fa + 4.0 * fl + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * fr + fb)
        refined = left + right
        err = np.abs(refined - whole) / 15.0
        tol = max(abs_tol, rel_tol * estimate) * (b - a) / width
        ok = err <= tol
        np.add.at(result, owner[ok], (refined + (refined - whole) / 15.0)[ok])
        if ok.all():
            return np.concatenate(([0.0], np.cumsum(result)))
        estimate = max(estimate, abs(result.sum() + refined[~ok].sum()))
        nf = ~ok
        if level == max_levels or 2 * nf.sum() > _QUAD_MAX_PANELS:
            break
        a, b = np.concatenate((a[nf], m[nf])), np.concatenate((m[nf], b[nf]))
        owner = np.concatenate((owner[nf], owner[nf]))
        fa, fb, fm = (np.concatenate((fa[nf], fm[nf])), np.concatenate((fm[nf], fb[nf])),
                      np.concatenate((fl[nf], fr[nf])))
        whole = np.concatenate((left[nf], right[nf]))
    raise QuadratureError(f"adaptive Simpson did not converge within {max_levels} levels")


def integrate(f: Callable, lo: float, hi: float, *, abs_tol: float = QUAD_ABS_TOL,
              rel_tol: float = QUAD_REL_TOL, max_levels: int = QUAD_MAX_LEVELS) -> float:
    """Adaptive composite Simpson integral of ``f`` over ``[lo, hi]``."""
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise InvalidInput("integration bounds must be finite")
    if lo == hi:
        return 0.0
    sign = 1.0
    if lo > hi:
        lo, hi, sign = hi, lo, -1.0
    cum = cumulative_integrate(f, np.linspace(lo, hi, 9), abs_tol=abs_tol,
                               rel_tol=rel_tol, max_levels=max_levels)
    return sign * float(cum[-1])
