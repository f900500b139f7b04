"""Registry of sufficient-condition sets for ordering extreme order statistics.

Each registered result names a list of machine-checkable hypotheses and a
predicted conclusion ``A <=_rel B``.  Evaluating a result against a
:class:`ComparisonScenario` checks every hypothesis and, independently, the
conclusion itself, so the registry can be audited for soundness: a report whose
hypotheses all pass while the conclusion clearly fails is a red flag.

Naming inside a scenario: ``X`` has generator ψ1, scales λ and counts ``n``;
``Y`` has generator ψ2, scales μ and counts ``n*``.  Both share the baselines
``F1`` and ``F2``.  ``X_n*`` is ``X`` re-drawn with ``Y``'s counts.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import majorization as mj
from .baselines import (
    Baseline,
    BaselineShape,
    Exponential,
    HazardComparison,
    Kummer,
    LomaxHalf,
    Pareto,
    Power,
    check_baseline_shape,
    compare_hazards,
)
from .copula import (
    GumbelExp,
    LogExp,
    RatioKind,
    Shape,
    check_log_concave,
    check_log_convex,
    check_ratio_shape,
    check_super_additive,
)
from .errors import InvalidInput
from .extremes import Extreme, ExtremeDistribution, MultipleOutlierModel
from .numerics import SHAPE_SLACK, ShapeVerdict, Status, both, either
from .orders import OrderStatus, OrderVerdict, Relation, check_order

RED_FLAG_FACTOR = 10.0


class Side(enum.Enum):
    X_N = "X_n"
    X_NSTAR = "X_n*"
    Y_NSTAR = "Y_n*"


@dataclass(frozen=True)
class ComparisonScenario:
    """Two multiple-outlier samples of the same extreme type."""

    model_X: MultipleOutlierModel
    model_Y: MultipleOutlierModel
    note: str = ""

    def __post_init__(self):
        if self.model_X.extreme is not self.model_Y.extreme:
            raise InvalidInput("both models must describe the same extreme (max vs min)")

    @classmethod
    def build(cls, generator_x, generator_y, baseline1, baseline2, scales_x, scales_y,
              counts_x, counts_y, extreme=Extreme.MAX, note: str = "") -> "ComparisonScenario":
        def model(g, lam, n):
            return MultipleOutlierModel(g, baseline1, baseline2, lam[0], lam[1], n[0], n[1],
                                        Extreme(extreme))
        return cls(model(generator_x, scales_x, counts_x),
                   model(generator_y, scales_y, counts_y), note)

    @property
    def extreme(self) -> Extreme:
        return self.model_X.extreme

    def side(self, which: Side) -> MultipleOutlierModel:
        if which is Side.X_N:
            return self.model_X
        if which is Side.Y_NSTAR:
            return self.model_Y
        return self.model_X.with_counts(*self.model_Y.counts)

    def describe(self) -> str:
        return f"X: {self.model_X.describe()}\nY: {self.model_Y.describe()}"


class _Context:
    """Per-scenario view with the quantities the hypotheses refer to."""

    def __init__(self, s: ComparisonScenario):
        self.s = s
        self.g1, self.g2 = s.model_X.generator, s.model_Y.generator
        self.b1, self.b2 = s.model_X.baseline1, s.model_X.baseline2
        self.lam, self.mu = s.model_X.scales, s.model_Y.scales
        self.n, self.nstar = s.model_X.counts, s.model_Y.counts

    def expanded(self, v):
        return mj.expand_outlier_vector(v[0], v[1], *self.nstar)


@dataclass(frozen=True)
class Hypothesis:
    name: str
    check: Callable[[_Context], ShapeVerdict]


@dataclass(frozen=True)
class Theorem:
    """One registered result: hypotheses and the predicted ``lower <=_rel upper``."""

    theorem_id: str
    extreme: Extreme
    summary: str
    hypotheses: tuple[Hypothesis, ...]
    relation: Relation
    lower: Side
    upper: Side

    @property
    def claim(self) -> str:
        return f"{self.lower.value} <={self.relation.value} {self.upper.value}"


@dataclass(frozen=True)
class ConditionReport:
    theorem_id: str
    hypotheses: tuple[tuple[str, ShapeVerdict], ...]
    conclusion_claim: tuple[Relation, Side, Side]
    conclusion_verdict: OrderVerdict

    @property
    def all_pass(self) -> bool:
        return all(v.passed for _, v in self.hypotheses)

    @property
    def all_robust(self) -> bool:
        return all(v.robust(RED_FLAG_FACTOR) for _, v in self.hypotheses)

    @property
    def failing(self) -> tuple[str, ...]:
        return tuple(name for name, v in self.hypotheses if v.failed)

    @property
    def red_flag(self) -> bool:
        """Every hypothesis passes yet the conclusion fails beyond float noise."""
        c = self.conclusion_verdict
        return self.all_pass and c.fails and c.margin < -RED_FLAG_FACTOR * c.slack

    @property
    def consistent(self) -> bool:
        return not self.red_flag

    @property
    def claim_text(self) -> str:
        rel, lo, hi = self.conclusion_claim
        return f"{lo.value} <={rel.value} {hi.value}"

    def render(self) -> str:
        width = max([len(n) for n, _ in self.hypotheses] + [10])
        lines = [f"theorem {self.theorem_id}: claim {self.claim_text}",
                 f"  {'hypothesis':<{width}}  status        margin  witness"]
        for name, v in self.hypotheses:
            wit = "" if v.witness is None else _fmt_witness(v.witness)
            lines.append(f"  {name:<{width}}  {v.status.value:<12}  {v.margin:>10.3g}  {wit}")
        c = self.conclusion_verdict
        lines.append(f"  conclusion: {c.summary()}")
        if c.note:
            lines.append(f"  note: {c.note}")
        if self.red_flag:
            verdict = "RED FLAG: hypotheses pass but conclusion fails"
        elif self.all_pass:
            verdict = "all hypotheses pass"
        else:
            undecided = sum(v.status is Status.INCONCLUSIVE for _, v in self.hypotheses)
            verdict = f"no claim: {len(self.failing)} failing, {undecided} inconclusive"
        lines.append(f"  consistent={self.consistent}  {verdict}")
        return "\n".join(lines)


def _fmt_witness(w) -> str:
    if isinstance(w, tuple):
        return "(" + ", ".join(f"{x:.6g}" for x in w) + ")"
    if isinstance(w, float):
        return f"{w:.6g}"
    return str(w)


# hypothesis factories -------------------------------------------------------

def _exact(name: str, pred: Callable[[_Context], bool],
           witness: Callable[[_Context], str]) -> Hypothesis:
    def check(c):
        ok = bool(pred(c))
        return ShapeVerdict.from_bool(ok, None if ok else witness(c))
    return Hypothesis(name, check)


def _shared_baselines() -> Hypothesis:
    def pred(c):
        x, y = c.s.model_X, c.s.model_Y
        return all(a.same_law(b) and a.scale == b.scale
                   for a, b in ((x.baseline1, y.baseline1), (x.baseline2, y.baseline2)))
    return _exact("X and Y share F1, F2", pred, lambda c: "baselines differ between X and Y")


def _same_generator() -> Hypothesis:
    return _exact("psi1 = psi2", lambda c: c.g1.same_as(c.g2),
                  lambda c: f"{c.g1.describe()} vs {c.g2.describe()}")


def _same_baseline(label: str = "F1 = F2") -> Hypothesis:
    return _exact(label, lambda c: c.b1.same_law(c.b2),
                  lambda c: f"{c.b1.describe()} vs {c.b2.describe()}")


def _cones(increasing: bool, with_mu: bool = True) -> Hypothesis:
    cone = mj.in_increasing_cone if increasing else mj.in_decreasing_cone
    tag = "E+" if increasing else "D+"
    name = f"lambda, mu in {tag}" if with_mu else f"lambda in {tag}"

    def pred(c):
        return cone(c.lam) and (not with_mu or cone(c.mu))
    return _exact(name, pred, lambda c: f"lambda={c.lam}, mu={c.mu}")


def _star_counts(ge: bool) -> Hypothesis:
    name = "n1* >= n2*" if ge else "n1* <= n2*"

    def pred(c):
        a, b = c.nstar
        return a >= b if ge else a <= b
    return _exact(name, pred, lambda c: f"n*={c.nstar}")


def _count_chain() -> Hypothesis:
    def pred(c):
        (n1, n2), (m1, m2) = c.n, c.nstar
        return 1 <= n1 <= m1 <= m2 <= n2
    return _exact("1 <= n1 <= n1* <= n2* <= n2", pred, lambda c: f"n={c.n}, n*={c.nstar}")


def _counts_submajorize() -> Hypothesis:
    return _exact("n >=_w n*", lambda c: mj.weakly_submajorizes(c.n, c.nstar),
                  lambda c: f"n={c.n}, n*={c.nstar}")


def _scales_super() -> Hypothesis:
    return _exact("lambda >=^w mu (expanded over n*)",
                  lambda c: mj.weakly_supermajorizes(c.expanded(c.lam), c.expanded(c.mu)),
                  lambda c: f"lambda={c.lam}, mu={c.mu}, n*={c.nstar}")


def _scales_sub() -> Hypothesis:
    return _exact("lambda >=_w mu (expanded over n*)",
                  lambda c: mj.weakly_submajorizes(c.expanded(c.lam), c.expanded(c.mu)),
                  lambda c: f"lambda={c.lam}, mu={c.mu}, n*={c.nstar}")


def _log_scales_sub() -> Hypothesis:
    def pred(c):
        m = np.log(c.expanded(c.lam))
        v = np.log(c.expanded(c.mu))
        # tail-sum comparisons of equal-length vectors are shift invariant
        shift = -min(m.min(), v.min(), 0.0)
        return mj.weakly_submajorizes(m + shift, v + shift)
    return _exact("log lambda >=_w log mu (expanded over n*)", pred,
                  lambda c: f"log lambda={np.log(c.lam).round(6).tolist()}, "
                            f"log mu={np.log(c.mu).round(6).tolist()}")


def _scale_ratio() -> Hypothesis:
    def pred(c):
        return max(c.lam) / min(c.lam) >= max(c.mu) / min(c.mu) * (1 - 1e-12)
    return _exact("lambda_2:2/lambda_1:2 >= mu_2:2/mu_1:2", pred,
                  lambda c: f"{max(c.lam) / min(c.lam):.6g} < {max(c.mu) / min(c.mu):.6g}")


def _super_additive() -> Hypothesis:
    return Hypothesis("phi2 o psi1 super-additive",
                      lambda c: check_super_additive(c.g2, c.g1))


def _log_convex_either() -> Hypothesis:
    return Hypothesis("psi1 or psi2 log-convex",
                      lambda c: either(check_log_convex(c.g1), check_log_convex(c.g2)))


def _log_convex() -> Hypothesis:
    return Hypothesis("psi log-convex", lambda c: check_log_convex(c.g1))


def _log_concave() -> Hypothesis:
    return Hypothesis("psi log-concave", lambda c: check_log_concave(c.g1))


def _ratio(kind: RatioKind, shape: Shape, label: str) -> Hypothesis:
    return Hypothesis(f"{label} {shape.value}", lambda c: check_ratio_shape(c.g1, kind, shape))


def _compare(mode: HazardComparison, swap: bool, label: str) -> Hypothesis:
    def check(c):
        a, b = (c.b2, c.b1) if swap else (c.b1, c.b2)
        return compare_hazards(a.unit(), b.unit(), mode)
    return Hypothesis(label, check)


def _shape_any(which: BaselineShape, label: str) -> Hypothesis:
    return Hypothesis(label, lambda c: either(check_baseline_shape(c.b1.unit(), which),
                                              check_baseline_shape(c.b2.unit(), which)))


def _shape_all(which: BaselineShape, label: str) -> Hypothesis:
    return Hypothesis(label, lambda c: both(check_baseline_shape(c.b1.unit(), which),
                                            check_baseline_shape(c.b2.unit(), which)))


_RT_LE = lambda: _compare(HazardComparison.REV_HAZARD_LEQ, False, "r~1 <= r~2")  # noqa: E731
_RT_GE = lambda: _compare(HazardComparison.REV_HAZARD_LEQ, True, "r~1 >= r~2")  # noqa: E731
_R_LE = lambda: _compare(HazardComparison.HAZARD_LEQ, False, "r1 <= r2")  # noqa: E731
_R_GE = lambda: _compare(HazardComparison.HAZARD_LEQ, True, "r1 >= r2")  # noqa: E731
_F_GE = lambda: _compare(HazardComparison.CDF_LEQ, True, "F1 >= F2")  # noqa: E731
_F_LE = lambda: _compare(HazardComparison.CDF_LEQ, False, "F1 <= F2")  # noqa: E731

_G = RatioKind.ONE_MINUS_PSI_OVER_DPSI


# registry -------------------------------------------------------------------

def _max_theorems() -> list[Theorem]:
    M = Extreme.MAX
    out = []
    for suffix, inc in (("_INC", True), ("_DEC", False)):
        cmp = _RT_GE() if inc else _RT_LE()
        common = (_shared_baselines(), cmp, _star_counts(inc), _cones(inc), _scales_super())
        out.append(Theorem(
            "MAX_ST_SAME_N" + suffix, M, "maxima, equal counts, usual stochastic order",
            common + (_super_additive(), _log_convex_either(),
                      _shape_any(BaselineShape.RT_DECREASING, "r~1 or r~2 decreasing")),
            Relation.ST, Side.Y_NSTAR, Side.X_NSTAR))
        out.append(Theorem(
            "MAX_ST_SAME_N_COR" + suffix, M, "maxima, equal counts, common generator",
            common + (_same_generator(), _log_convex(),
                      _shape_any(BaselineShape.RT_DECREASING, "r~1 or r~2 decreasing")),
            Relation.ST, Side.Y_NSTAR, Side.X_NSTAR))
        out.append(Theorem(
            "MAX_RH_SAME_N" + suffix, M, "maxima, equal counts, reversed hazard rate order",
            (_shared_baselines(), _same_baseline("r1 = r2 (F1 = F2)"), _star_counts(inc),
             _cones(inc), _same_generator(), _log_concave(),
             _ratio(_G, Shape.DECREASING, "(1-psi)/psi'"),
             _ratio(RatioKind.PRODUCT_RULE_TERM, Shape.INCREASING, "g g'"),
             _scales_super(),
             _shape_all(BaselineShape.R_DECREASING, "r decreasing"),
             _shape_all(BaselineShape.XR_DECREASING, "x r(x) decreasing"),
             _shape_all(BaselineShape.XR_CONVEX, "x r(x) convex")),
            Relation.RH, Side.Y_NSTAR, Side.X_NSTAR))
    sizes = (_count_chain(), _counts_submajorize(), _cones(False, with_mu=False))
    out.append(Theorem("MAX_ST_SAMPLE_SIZES", M, "maxima, different counts, common scales",
                       sizes + (_F_GE(),), Relation.ST, Side.X_NSTAR, Side.X_N))
    out.append(Theorem("MAX_ST_SAMPLE_SIZES_COR", M, "maxima, different counts, F1 = F2",
                       sizes + (_same_baseline(),), Relation.ST, Side.X_NSTAR, Side.X_N))
    combined = (_shared_baselines(), _RT_LE(), _count_chain(), _counts_submajorize(),
                _scales_super(), _cones(False), _F_GE())
    tail = (_shape_any(BaselineShape.RT_DECREASING, "r~1 or r~2 decreasing"),)
    out.append(Theorem("MAX_ST_COMBINED", M, "maxima, different counts and scales",
                       combined + (_super_additive(), _log_convex_either()) + tail,
                       Relation.ST, Side.Y_NSTAR, Side.X_N))
    out.append(Theorem("MAX_ST_COMBINED_COR", M, "maxima, different counts, common generator",
                       combined + (_same_generator(), _log_convex()) + tail,
                       Relation.ST, Side.Y_NSTAR, Side.X_N))
    out.append(Theorem(
        "MAX_RH_SAMPLE_SIZES", M, "maxima, different counts, reversed hazard rate order",
        (_same_baseline("r1 = r2 (F1 = F2)"),) + sizes
        + (_log_concave(), _ratio(_G, Shape.DECREASING, "(1-psi)/psi'"),
           _shape_all(BaselineShape.XR_DECREASING, "x r(x) decreasing")),
        Relation.RH, Side.X_NSTAR, Side.X_N))
    out.append(Theorem(
        "MAX_RH_COMBINED", M, "maxima, different counts and scales, reversed hazard rate order",
        (_shared_baselines(), _same_generator(), _same_baseline("r1 = r2 (F1 = F2)"),
         _cones(False), _count_chain(), _counts_submajorize(), _scales_super(), _log_concave(),
         _ratio(_G, Shape.DECREASING, "(1-psi)/psi'"),
         _ratio(RatioKind.PRODUCT_RULE_TERM, Shape.INCREASING, "g g'"),
         _shape_all(BaselineShape.XR_DECREASING, "x r(x) decreasing"),
         _shape_all(BaselineShape.XR_CONVEX, "x r(x) convex"),
         _shape_all(BaselineShape.R_DECREASING, "r decreasing")),
        Relation.RH, Side.Y_NSTAR, Side.X_N))
    star = (_shared_baselines(), _same_baseline("r~1 = r~2 (F1 = F2)"), _same_generator(),
            _scale_ratio(),
            _ratio(RatioKind.PSI_OVER_DPSI, Shape.DECREASING, "psi/psi'"),
            _ratio(RatioKind.PSI_OVER_DPSI, Shape.CONVEX, "psi/psi'"),
            _shape_all(BaselineShape.ELASTICITY_RT_DECREASING, "x r~'(x)/r~(x) decreasing"),
            _shape_all(BaselineShape.XRT_INCREASING, "x r~(x) increasing"))
    out.append(Theorem("MAX_STAR", M, "maxima, star order", star,
                       Relation.STAR, Side.Y_NSTAR, Side.X_NSTAR))
    out.append(Theorem("MAX_LORENZ", M, "maxima, Lorenz order (via the star order)", star,
                       Relation.LORENZ, Side.Y_NSTAR, Side.X_NSTAR))
    return out


def _min_theorems() -> list[Theorem]:
    M = Extreme.MIN
    out = []
    for suffix, inc in (("_INC", True), ("_DEC", False)):
        cmp = _R_LE() if inc else _R_GE()
        common = (_shared_baselines(), cmp, _star_counts(not inc), _cones(inc), _scales_sub())
        tail = (_shape_any(BaselineShape.R_INCREASING, "r1 or r2 increasing"),)
        out.append(Theorem(
            "MIN_ST_SAME_N" + suffix, M, "minima, equal counts, usual stochastic order",
            common + (_super_additive(), _log_convex_either()) + tail,
            Relation.ST, Side.X_NSTAR, Side.Y_NSTAR))
        out.append(Theorem(
            "MIN_ST_SAME_N_COR" + suffix, M, "minima, equal counts, common generator",
            common + (_same_generator(), _log_convex()) + tail,
            Relation.ST, Side.X_NSTAR, Side.Y_NSTAR))
        out.append(Theorem(
            "MIN_HR_SAME_N" + suffix, M, "minima, equal counts, hazard rate order",
            (_shared_baselines(), _same_generator(), _same_baseline(), _star_counts(not inc),
             _cones(inc), _log_concave(), _ratio(_G, Shape.DECREASING, "(1-psi)/psi'"),
             _ratio(RatioKind.RATIO_OF_DERIVATIVES, Shape.INCREASING, "g'/(psi/psi')"),
             _log_scales_sub(),
             _shape_all(BaselineShape.R_INCREASING, "r increasing"),
             _shape_all(BaselineShape.XRT_INCREASING, "x r~(x) increasing"),
             _shape_all(BaselineShape.XRT_CONVEX, "x r~(x) convex")),
            Relation.HR, Side.X_NSTAR, Side.Y_NSTAR))
    sizes = (_count_chain(), _counts_submajorize(), _cones(True, with_mu=False))
    out.append(Theorem("MIN_ST_SAMPLE_SIZES", M, "minima, different counts, common scales",
                       sizes + (_F_LE(),), Relation.ST, Side.X_N, Side.X_NSTAR))
    out.append(Theorem("MIN_ST_SAMPLE_SIZES_COR", M, "minima, different counts, F1 = F2",
                       sizes + (_same_baseline(),), Relation.ST, Side.X_N, Side.X_NSTAR))
    combined = (_shared_baselines(), _R_LE(), _cones(True), _count_chain(),
                _counts_submajorize(), _scales_sub(), _F_LE())
    tail = (_shape_any(BaselineShape.R_INCREASING, "r1 or r2 increasing"),)
    out.append(Theorem("MIN_ST_COMBINED", M, "minima, different counts and scales",
                       combined + (_super_additive(), _log_convex_either()) + tail,
                       Relation.ST, Side.X_N, Side.Y_NSTAR))
    out.append(Theorem("MIN_ST_COMBINED_COR", M, "minima, different counts, common generator",
                       combined + (_same_generator(), _log_convex()) + tail,
                       Relation.ST, Side.X_N, Side.Y_NSTAR))
    out.append(Theorem(
        "MIN_HR_SAMPLE_SIZES", M, "minima, different counts, hazard rate order",
        (_same_baseline("r~1 = r~2 (F1 = F2)"),) + sizes
        + (_shape_all(BaselineShape.XRT_INCREASING, "x r~(x) increasing"),
           _log_concave(), _ratio(_G, Shape.DECREASING, "(1-psi)/psi'")),
        Relation.HR, Side.X_N, Side.X_NSTAR))
    out.append(Theorem(
        "MIN_HR_COMBINED", M, "minima, different counts and scales, hazard rate order",
        (_shared_baselines(), _same_generator(), _same_baseline("r1 = r2 (F1 = F2)"),
         _cones(True), _count_chain(), _counts_submajorize(), _log_scales_sub(),
         _log_concave(), _ratio(_G, Shape.DECREASING, "(1-psi)/psi'"),
         _ratio(RatioKind.RATIO_OF_DERIVATIVES, Shape.INCREASING, "g'/(psi/psi')"),
         _shape_all(BaselineShape.R_INCREASING, "r increasing"),
         _shape_all(BaselineShape.XRT_INCREASING, "x r~(x) increasing"),
         _shape_all(BaselineShape.XRT_CONVEX, "x r~(x) convex")),
        Relation.HR, Side.X_N, Side.Y_NSTAR))
    star = (_shared_baselines(), _same_baseline("r~1 = r~2 (F1 = F2)"), _same_generator(),
            _scale_ratio(),
            _ratio(RatioKind.PSI_OVER_DPSI, Shape.DECREASING, "psi/psi'"),
            _ratio(RatioKind.PSI_OVER_DPSI, Shape.CONVEX, "psi/psi'"),
            _shape_all(BaselineShape.ELASTICITY_R_DECREASING, "x r'(x)/r(x) decreasing"),
            _shape_all(BaselineShape.XR_DECREASING_STAR, "x r(x) decreasing"))
    out.append(Theorem("MIN_STAR", M, "minima, star order", star,
                       Relation.STAR, Side.Y_NSTAR, Side.X_NSTAR))
    out.append(Theorem("MIN_LORENZ", M, "minima, Lorenz order (via the star order)", star,
                       Relation.LORENZ, Side.Y_NSTAR, Side.X_NSTAR))
    return out


REGISTRY: dict[str, Theorem] = {t.theorem_id: t for t in _max_theorems() + _min_theorems()}

# two-sided results resolve to the variant matching the order of lambda
_TWO_SIDED = ("MAX_ST_SAME_N", "MAX_ST_SAME_N_COR", "MAX_RH_SAME_N",
              "MIN_ST_SAME_N", "MIN_ST_SAME_N_COR", "MIN_HR_SAME_N")


def theorem_ids(include_aliases: bool = False) -> list[str]:
    ids = list(REGISTRY)
    return ids + list(_TWO_SIDED) if include_aliases else ids


def resolve(theorem_id: str, s: ComparisonScenario | None = None) -> Theorem:
    key = str(theorem_id).upper()
    if key in _TWO_SIDED:
        if s is None:
            raise InvalidInput(f"{key} needs a scenario to pick its _INC/_DEC variant")
        lam = s.model_X.scales
        key += "_INC" if lam[0] <= lam[1] else "_DEC"
    if key not in REGISTRY:
        raise InvalidInput(f"unknown theorem id {theorem_id!r}")
    return REGISTRY[key]


def _conclusion(t: Theorem, s: ComparisonScenario, cache: dict | None) -> OrderVerdict:
    key = (t.relation, t.lower, t.upper)
    if cache is not None and key in cache:
        return cache[key]
    a = ExtremeDistribution(s.side(t.lower))
    b = ExtremeDistribution(s.side(t.upper))
    verdict = check_order(t.relation, a, b)
    if cache is not None:
        cache[key] = verdict
    return verdict


def evaluate_theorem(theorem_id: str, s: ComparisonScenario, *,
                     disabled: Iterable[str] = (), cache: dict | None = None) -> ConditionReport:
    """Check every hypothesis of ``theorem_id`` and, separately, its conclusion.

    Hypotheses named in ``disabled`` are skipped; the conclusion never depends
    on them.  ``cache`` may be shared between calls on the same scenario to
    reuse conclusion verdicts.
    """
    t = resolve(theorem_id, s)
    if t.extreme is not s.extreme:
        raise InvalidInput(f"{t.theorem_id} is about the {t.extreme.value}, "
                           f"scenario describes the {s.extreme.value}")
    ctx = _Context(s)
    skip = set(disabled)
    hyps = tuple((h.name, h.check(ctx)) for h in t.hypotheses if h.name not in skip)
    return ConditionReport(t.theorem_id, hyps, (t.relation, t.lower, t.upper),
                           _conclusion(t, s, cache))


# built-in and random scenarios ------------------------------------------------

@dataclass(frozen=True)
class Expectation:
    """What a built-in scenario is expected to show under its theorem.

    ``paper_failing`` lists the hypotheses the source example reports as
    violated; ``extra_failing`` lists further violations the grid checks
    detect (documented discrepancies).
    """

    theorem_id: str
    conclusion: OrderStatus
    paper_failing: tuple[str, ...] = ()
    extra_failing: tuple[str, ...] = ()

    @property
    def failing(self) -> frozenset[str]:
        return frozenset(self.paper_failing) | frozenset(self.extra_failing)


def builtin_scenarios() -> list[tuple[str, ComparisonScenario, Expectation]]:
    """The six worked examples and counterexamples, with their expectations."""
    e = math.exp
    build = ComparisonScenario.build
    return [
        ("ex_3_1",
         build(GumbelExp(9), GumbelExp(10), Exponential(), Kummer(), (5, 2), (6, 3),
               (1, 11), (5, 6), Extreme.MAX, "maxima, usual stochastic order holds"),
         Expectation("MAX_ST_COMBINED", OrderStatus.HOLDS)),
        ("ce_3_1",
         build(GumbelExp(3), GumbelExp(10), Exponential(), LomaxHalf(), (2, 6), (8, 2),
               (1, 8), (3, 4), Extreme.MAX, "maxima, distribution functions cross"),
         Expectation("MAX_ST_COMBINED", OrderStatus.FAILS,
                     ("lambda, mu in D+", "r~1 <= r~2"),
                     ("lambda >=^w mu (expanded over n*)",))),
        ("ex_3_2",
         build(LogExp(0.2), LogExp(0.2), Pareto(5, 1), Pareto(5, 1), (3, 2), (6, 5),
               (2, 10), (3, 4), Extreme.MAX, "maxima, reversed hazard rate order holds"),
         Expectation("MAX_RH_COMBINED", OrderStatus.HOLDS)),
        ("ex_3_4",
         build(GumbelExp(9), GumbelExp(10), Power(400, 2), Exponential(), (2, 6), (1, 3),
               (4, 8), (6, 7), Extreme.MIN, "minima, usual stochastic order holds"),
         Expectation("MIN_ST_COMBINED", OrderStatus.HOLDS, (),
                     ("r1 <= r2", "n >=_w n*"))),
        ("ce_3_2",
         build(GumbelExp(4.5), GumbelExp(5), Exponential(), LomaxHalf(), (1.2, 3.6), (1.4, 3),
               (2, 11), (3, 9), Extreme.MIN, "minima, survival functions cross"),
         Expectation("MIN_ST_COMBINED", OrderStatus.FAILS, ("r1 <= r2",), ("F1 <= F2",))),
        ("ex_3_5",
         build(LogExp(0.99), LogExp(0.99), Power(1000, 2), Power(1000, 2),
               (e(0.5), e(0.6)), (e(0.2), e(0.3)), (2, 11), (3, 7), Extreme.MIN,
               "minima, hazard rate order holds"),
         Expectation("MIN_HR_COMBINED", OrderStatus.HOLDS)),
    ]


def builtin(name: str) -> ComparisonScenario:
    for key, s, _ in builtin_scenarios():
        if key == name:
            return s
    raise InvalidInput(f"unknown built-in scenario {name!r}")


def _random_generator(rng: np.random.Generator):
    if rng.random() < 0.5:
        return GumbelExp(float(rng.uniform(1.5, 12.0)))
    return LogExp(float(rng.uniform(0.1, 1.0)))


def _random_baseline(rng: np.random.Generator) -> Baseline:
    k = int(rng.integers(5))
    if k == 0:
        return Exponential()
    if k == 1:
        return Kummer()
    if k == 2:
        return LomaxHalf()
    if k == 3:
        return Power(float(rng.uniform(50.0, 1000.0)), float(rng.uniform(1.0, 3.0)))
    return Pareto(float(rng.uniform(1.0, 6.0)), float(rng.uniform(0.5, 2.0)))


def random_scenario(rng: np.random.Generator, extreme: Extreme = Extreme.MAX) -> ComparisonScenario:
    """Draw a scenario from the named families.

    Coin flips share the generator, share the baseline, align the scale
    orderings and chain the counts, so that a fair share of draws satisfies
    whole hypothesis lists.
    """
    g1 = _random_generator(rng)
    g2 = g1 if rng.random() < 0.5 else _random_generator(rng)
    b1 = _random_baseline(rng)
    b2 = b1 if rng.random() < 0.5 else _random_baseline(rng)
    lam = np.sort(rng.uniform(0.5, 8.0, 2))
    mu = np.sort(rng.uniform(0.5, 8.0, 2))
    if rng.random() < 0.5:
        lam = lam[::-1]
        mu = mu[::-1] if rng.random() < 0.8 else mu
    if rng.random() < 0.6:
        n1, m1, m2, n2 = np.sort(rng.integers(1, 13, 4))
    else:
        n1, n2, m1, m2 = rng.integers(1, 13, 4)
    return ComparisonScenario.build(g1, g2, b1, b2, tuple(map(float, lam)),
                                    tuple(map(float, mu)), (int(n1), int(n2)),
                                    (int(m1), int(m2)), Extreme(extreme), "random draw")


@dataclass(frozen=True)
class AuditResult:
    reports: tuple[tuple[str, ConditionReport], ...] = field(default_factory=tuple)

    @property
    def red_flags(self) -> tuple[tuple[str, ConditionReport], ...]:
        return tuple((n, r) for n, r in self.reports if r.red_flag)

    @property
    def robust_failures(self) -> tuple[tuple[str, ConditionReport], ...]:
        """Reports whose hypotheses all pass robustly while the conclusion fails."""
        return tuple((n, r) for n, r in self.reports
                     if r.all_robust and r.conclusion_verdict.fails)

    @property
    def claims(self) -> int:
        return sum(r.all_pass for _, r in self.reports)


def audit(count: int = 100, seed: int = 42, *, include_builtin: bool = True,
          relations: Iterable[Relation] | None = None) -> AuditResult:
    """Evaluate every registered result on built-in plus ``count`` random scenarios.

    Random scenarios alternate between maxima and minima.  ``relations``
    restricts the audit to results whose conclusion uses one of them.
    """
    rng = np.random.default_rng(seed)
    keep = None if relations is None else {Relation(r) for r in relations}
    scenarios = []
    if include_builtin:
        scenarios += [(name, s) for name, s, _ in builtin_scenarios()]
    for i in range(count):
        extreme = Extreme.MAX if i % 2 == 0 else Extreme.MIN
        scenarios.append((f"random_{i:03d}", random_scenario(rng, extreme)))
    reports = []
    for name, s in scenarios:
        cache: dict = {}
        for t in REGISTRY.values():
            if t.extreme is not s.extreme or (keep is not None and t.relation not in keep):
                continue
            reports.append((name, evaluate_theorem(t.theorem_id, s, cache=cache)))
    return AuditResult(tuple(reports))


def schur_spot_check(f: Callable[[np.ndarray], float], pairs, convex: bool = True,
                     slack: float = SHAPE_SLACK) -> ShapeVerdict:
    """Numeric Schur-convexity (or concavity) check on given vector pairs.

    For every ``(x, y)`` with ``y`` majorizing ``x`` the check requires
    ``f(x) <= f(y)`` (convex) or ``f(x) >= f(y)`` (concave).  Pairs that are not
    ordered by majorization are skipped.
    """
    pairs = list(pairs)
    worst, witness, used = math.inf, None, 0
    for x, y in pairs:
        if not mj.majorizes(y, x):
            continue
        used += 1
        fx, fy = float(f(np.asarray(x, dtype=float))), float(f(np.asarray(y, dtype=float)))
        gap = (fy - fx) if convex else (fx - fy)
        gap /= max(1.0, abs(fx), abs(fy))
        if gap < worst:
            worst, witness = gap, (tuple(map(float, x)), tuple(map(float, y)))
    if used == 0:
        return ShapeVerdict(Status.INCONCLUSIVE, excluded_count=len(pairs), slack=slack)
    if worst < -slack:
        return ShapeVerdict(Status.FAIL, witness=str(witness), margin=worst, slack=slack)
    return ShapeVerdict(Status.PASS, margin=worst, slack=slack)
