"""Grid verdicts for the usual stochastic, hazard rate, reversed hazard rate,
star and Lorenz orders.

Every check reads ``A <= B`` and accepts any distribution object exposing
``cdf``, ``sf``, ``log_cdf``, ``log_sf``, ``hazard``, ``rev_hazard``,
``quantile``, ``isf`` and ``support`` (both :class:`ExtremeDistribution` and
:class:`Baseline` qualify).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, QuadratureError
from .numerics import (
    DEFAULT_GRID_COUNT,
    MAX_EXCLUDED_FRACTION,
    Direction,
    Grid,
    Spacing,
    Status,
    check_monotone,
    cumulative_integrate,
    evaluate,
    make_grid,
)

TAIL_PROB = 1e-4
# x grids reach far enough into both tails that an hr/rh verdict and an st
# verdict at PROB_SLACK are decided on the same stretch
PAIR_TAIL_PROB = 1e-10
PROB_SLACK = 1e-8
HAZARD_SLACK = 1e-6
RATIO_SLACK = 1e-8
_EDGE_NUDGE = 1e-9
# quantile integrals: split points, tail probing in w = -ln(v / v0), round-trip check
_END_SPLIT = 0.01
_END_STEP = 5.0
_END_V_MIN = 1e-300
_END_DECAY = 1e-18
_ROUND_TRIP = 1e-6
_MIN_TAIL_EXPONENT = 1e-3


class Relation(enum.Enum):
    ST = "st"
    HR = "hr"
    RH = "rh"
    STAR = "star"
    LORENZ = "lorenz"


class OrderStatus(enum.Enum):
    HOLDS = "HOLDS"
    FAILS = "FAILS"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class OrderVerdict:
    """Outcome of ``A <= B`` for one relation.

    ``margin`` is the smallest signed slack observed in the defining
    inequality (negative means violated); ``witness`` is the worst ``x`` (or
    ``u`` for probability-domain relations) when the relation fails.
    """

    relation: Relation
    status: OrderStatus
    witness: float | None = None
    margin: float = math.nan
    excluded_count: int = 0
    slack: float = PROB_SLACK
    note: str = ""

    def __post_init__(self):
        if self.status is OrderStatus.FAILS and self.witness is None:
            raise InvalidInput("a FAILS verdict needs a witness")

    @property
    def holds(self) -> bool:
        return self.status is OrderStatus.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is OrderStatus.FAILS

    def robust(self, factor: float = 10.0) -> bool:
        """HOLDS with the margin clear of the slack by ``factor``."""
        return self.holds and self.margin > factor * self.slack

    def summary(self) -> str:
        parts = [f"relation={self.relation.value}", f"status={self.status.value}",
                 f"margin={self.margin:.6g}", f"excluded={self.excluded_count}",
                 f"slack={self.slack:g}"]
        if self.witness is not None:
            parts.insert(2, f"witness={self.witness:.10g}")
        return " ".join(parts)


def pair_grid(a, b, count: int = DEFAULT_GRID_COUNT) -> Grid:
    """LOG grid over the union of both central ranges, inside the union of supports.

    Stretches where only one law has mass are kept on purpose: the hazard
    orders are decided there as often as in the bulk.
    """
    lo = min(float(a.quantile(PAIR_TAIL_PROB)), float(b.quantile(PAIR_TAIL_PROB)))
    hi = max(float(a.isf(PAIR_TAIL_PROB)), float(b.isf(PAIR_TAIL_PROB)))
    (la, ha), (lb, hb) = a.support(), b.support()
    lo = max(lo, min(la, lb) * (1 + _EDGE_NUDGE), 1e-300)
    hi = min(hi, max(ha, hb) * (1 - _EDGE_NUDGE))
    return make_grid(lo, hi, count, Spacing.LOG)


def probability_grid(count: int = DEFAULT_GRID_COUNT) -> Grid:
    return make_grid(TAIL_PROB, 1.0 - TAIL_PROB, count, Spacing.LINEAR)


def _from_margins(relation, points, margins, slack, total, note="") -> OrderVerdict:
    keep = np.isfinite(margins)
    excluded = int(total - keep.sum())
    if not keep.any():
        return OrderVerdict(relation, OrderStatus.INCONCLUSIVE, excluded_count=excluded,
                            slack=slack, note=note or "no evaluable points")
    m, pts = margins[keep], points[keep]
    worst = int(np.argmin(m))
    margin = float(m[worst])
    if margin < -slack:
        return OrderVerdict(relation, OrderStatus.FAILS, witness=float(pts[worst]),
                            margin=margin, excluded_count=excluded, slack=slack, note=note)
    if excluded > MAX_EXCLUDED_FRACTION * total:
        return OrderVerdict(relation, OrderStatus.INCONCLUSIVE, margin=margin,
                            excluded_count=excluded, slack=slack,
                            note=note or "too many points excluded")
    return OrderVerdict(relation, OrderStatus.HOLDS, margin=margin, excluded_count=excluded,
                        slack=slack, note=note)


def check_st(a, b, grid: Grid | None = None, slack: float = PROB_SLACK) -> OrderVerdict:
    """``A <=_st B``: ``S_A(x) <= S_B(x)`` everywhere on the grid."""
    grid = pair_grid(a, b) if grid is None else grid
    margins = evaluate(b.sf, grid.points) - evaluate(a.sf, grid.points)
    return _from_margins(Relation.ST, grid.points, margins, slack, grid.count)


def _log_probs(d, name, x):
    with np.errstate(all="ignore"):
        return np.asarray(getattr(d, name)(x), dtype=float)


def _rates(d, name, log_other, x):
    """Hazard or reversed hazard, with the trivial 0 where S = 1 (or F = 1)."""
    values = evaluate(getattr(d, name), x)
    return np.where(np.isnan(values) & (log_other == 0), 0.0, values)


def _dual_check(relation, grid, a, b, slack):
    """``A <= B`` in hr or rh: pointwise rates cross-checked against a monotone log ratio.

    For hr the ratio is ``S_B / S_A`` and for rh it is ``F_B / F_A``, with the
    convention ``c / 0 = inf``.  The ratio leaves +inf only if a zero appears
    in the numerator first (B dies before A for hr, B starts after A for rh),
    which is an outright violation.  Points where the ratio is 0/0 or +inf
    carry no information and are dropped from the grid.
    """
    hr = relation is Relation.HR
    prob, rate = ("log_sf", "hazard") if hr else ("log_cdf", "rev_hazard")
    x = grid.points
    pa, pb = _log_probs(a, prob, x), _log_probs(b, prob, x)
    # hr: S_B = 0 < S_A; rh: F_A = 0 < F_B
    num, den = (pb, pa) if hr else (pa, pb)
    bad = np.isneginf(num) & np.isfinite(den)
    if bad.any():
        i = int(np.flatnonzero(bad)[-1 if hr else 0])
        return OrderVerdict(relation, OrderStatus.FAILS, witness=float(x[i]), margin=-1.0,
                            slack=slack, note="support ends out of order")
    keep = np.isfinite(pa) & np.isfinite(pb)
    if keep.sum() < 2:
        return OrderVerdict(relation, OrderStatus.INCONCLUSIVE, excluded_count=grid.count,
                            slack=slack, note="no common support on the grid")
    sub = Grid(x[keep], grid.spacing)
    ra, rb = _rates(a, rate, pa[keep], sub.points), _rates(b, rate, pb[keep], sub.points)
    lo_v, up_v = (rb, ra) if hr else (ra, rb)
    scale = np.maximum(np.abs(lo_v), np.abs(up_v))
    with np.errstate(all="ignore"):
        margins = np.where(scale > 0, (up_v - lo_v) / np.where(scale > 0, scale, 1.0), 0.0)
    margins = np.where(np.isfinite(lo_v) & np.isfinite(up_v), margins, np.nan)
    pointwise = _from_margins(relation, sub.points, margins, slack, sub.count)
    if pointwise.status is OrderStatus.INCONCLUSIVE:
        return pointwise
    ratio = check_monotone(pb[keep] - pa[keep], sub, Direction.INCREASING, RATIO_SLACK)
    agree = (pointwise.holds and ratio.status is Status.PASS) or \
            (pointwise.fails and ratio.status is Status.FAIL)
    if agree:
        note = "pointwise rates and monotone ratio agree"
        return OrderVerdict(relation, pointwise.status, pointwise.witness, pointwise.margin,
                            pointwise.excluded_count, slack, note)
    note = (f"pointwise rates {pointwise.status.value} but ratio monotonicity "
            f"{ratio.status.value}" + (f" at {ratio.witness:.6g}" if ratio.failed else ""))
    return OrderVerdict(relation, OrderStatus.INCONCLUSIVE, margin=pointwise.margin,
                        excluded_count=pointwise.excluded_count, slack=slack, note=note)


def check_hr(a, b, grid: Grid | None = None, slack: float = HAZARD_SLACK) -> OrderVerdict:
    """``A <=_hr B``: ``r_A >= r_B``, equivalently ``S_B / S_A`` increasing."""
    grid = pair_grid(a, b) if grid is None else grid
    return _dual_check(Relation.HR, grid, a, b, slack)


def check_rh(a, b, grid: Grid | None = None, slack: float = HAZARD_SLACK) -> OrderVerdict:
    """``A <=_rh B``: ``r~_A <= r~_B``, equivalently ``F_B / F_A`` increasing."""
    grid = pair_grid(a, b) if grid is None else grid
    return _dual_check(Relation.RH, grid, a, b, slack)


def check_star(a, b, grid_u: Grid | None = None, slack: float = PROB_SLACK) -> OrderVerdict:
    """``A <=_* B``: ``Q_B(u) / Q_A(u)`` increasing in ``u``.

    Monotonicity is tested on the log of the ratio, which makes the verdict
    exactly invariant under rescaling either argument.
    """
    grid_u = probability_grid() if grid_u is None else grid_u
    u = grid_u.points
    with np.errstate(all="ignore"):
        log_ratio = np.log(np.asarray(b.quantile(u))) - np.log(np.asarray(a.quantile(u)))
    verdict = check_monotone(log_ratio, grid_u, Direction.INCREASING, slack)
    status = {Status.PASS: OrderStatus.HOLDS, Status.FAIL: OrderStatus.FAILS,
              Status.INCONCLUSIVE: OrderStatus.INCONCLUSIVE}[verdict.status]
    return OrderVerdict(Relation.STAR, status, verdict.witness, verdict.margin,
                        verdict.excluded_count, slack, "log quantile ratio monotonicity")


def _end_piece(inverse, prob, start: float) -> float:
    """``∫_0^start Q(v) dv`` where ``Q = inverse`` blows up or vanishes as ``v -> 0``.

    ``v`` is a tail probability (``u`` for the lower end, ``1 - u`` for the
    upper end).  Writing ``v = start e^(-w)`` turns algebraic end behaviour
    into exponential decay in ``w``.  The integrand is probed every
    ``_END_STEP`` in ``w`` until it is negligible, stops being representable
    (``prob(Q(v)) = v`` fails) or ``v`` reaches 1e-300.  Beyond the last probe
    the power-law remainder ``v Q(v) / (1 + s)`` is added, ``s`` being the
    local slope of ``ln Q`` against ``ln v``; ``s <= -1`` means divergence.
    """
    w = np.arange(0.0, math.log(start / _END_V_MIN), _END_STEP)
    v = start * np.exp(-w)
    q = evaluate(inverse, v)
    with np.errstate(all="ignore"):
        back = evaluate(prob, q)
        ok = np.isfinite(q) & (np.abs(back / v - 1.0) <= _ROUND_TRIP)
    valid = int(np.argmin(ok)) if not ok.all() else ok.size
    if valid == 0:
        raise QuadratureError(f"quantile not representable at tail probability {start:g}")
    g = q[:valid] * v[:valid]
    running = np.concatenate(([0.0], np.cumsum(0.5 * (g[1:] + g[:-1]) * _END_STEP)))
    small = np.flatnonzero(g <= _END_DECAY * np.maximum(running, g[0]))
    cut = int(small[0]) if small.size else valid - 1

    def integrand(t):
        vt = start * np.exp(-np.asarray(t, dtype=float))
        return np.asarray(inverse(vt), dtype=float) * vt

    body = float(cumulative_integrate(integrand, w[:cut + 1])[-1]) if cut > 0 else 0.0
    if q[cut] == 0.0 or g[cut] == 0.0:
        return body
    if cut == 0:
        slope = 0.0
    else:
        slope = (math.log(q[cut]) - math.log(q[cut - 1])) / -_END_STEP
    if 1.0 + slope <= _MIN_TAIL_EXPONENT:
        raise QuadratureError(f"mean diverges: quantile grows like v^{slope:.3g} in the tail")
    return body + float(g[cut]) / (1.0 + slope)


def _quantile_integrals(d, u):
    """``(∫_0^u Q for each u, ∫_0^1 Q)`` for sorted ``u`` in (0, 1)."""
    u = np.asarray(u, dtype=float)
    lo = min(_END_SPLIT, float(u.min())) if u.size else _END_SPLIT
    hi = max(1.0 - _END_SPLIT, float(u.max())) if u.size else 1.0 - _END_SPLIT
    pts = np.unique(np.concatenate(([lo], u, [hi])))
    cum = cumulative_integrate(lambda t: np.asarray(d.quantile(t), dtype=float), pts)
    head = _end_piece(d.quantile, d.cdf, lo)
    tail = _end_piece(d.isf, d.sf, 1.0 - hi)
    total = head + float(cum[-1]) + tail
    if not (math.isfinite(total) and total > 0):
        raise QuadratureError("mean is not finite and positive")
    return head + cum[np.searchsorted(pts, u)], total


def quantile_integral(d) -> float:
    """``∫_0^1 Q(t) dt``, the mean; raises QuadratureError when it diverges."""
    return _quantile_integrals(d, np.empty(0))[1]


def lorenz_curve(d, u) -> np.ndarray:
    """``L(u) = ∫_0^u Q / ∫_0^1 Q`` at the increasing points ``u`` in (0, 1)."""
    partial, total = _quantile_integrals(d, u)
    return partial / total


def check_lorenz(a, b, grid_u: Grid | None = None, slack: float = PROB_SLACK) -> OrderVerdict:
    """``A <=_Lorenz B``: ``L_A(u) >= L_B(u)`` on the probability grid."""
    grid_u = probability_grid() if grid_u is None else grid_u
    try:
        la, lb = lorenz_curve(a, grid_u.points), lorenz_curve(b, grid_u.points)
    except QuadratureError as exc:
        return OrderVerdict(Relation.LORENZ, OrderStatus.INCONCLUSIVE, slack=slack,
                            excluded_count=grid_u.count, note=f"quadrature failed: {exc}")
    return _from_margins(Relation.LORENZ, grid_u.points, la - lb, slack, grid_u.count)


CHECKS = {
    Relation.ST: check_st,
    Relation.HR: check_hr,
    Relation.RH: check_rh,
    Relation.STAR: check_star,
    Relation.LORENZ: check_lorenz,
}


def check_order(relation: Relation, a, b, grid: Grid | None = None) -> OrderVerdict:
    """Dispatch on ``relation``; ``grid`` is over x, or over u for star/Lorenz."""
    return CHECKS[Relation(relation)](a, b, grid)
