import math

import numpy as np
import pytest

from extremeorder.errors import InvalidInput
from extremeorder.extremes import Extreme
from extremeorder.numerics import ShapeVerdict, Status
from extremeorder.orders import OrderStatus, OrderVerdict, Relation
from extremeorder.theorems import (
    REGISTRY,
    ComparisonScenario,
    ConditionReport,
    Side,
    audit,
    builtin,
    builtin_scenarios,
    evaluate_theorem,
    random_scenario,
    resolve,
    schur_spot_check,
    theorem_ids,
)

BUILTINS = builtin_scenarios()


def _report(hyp_status, conclusion_margin):
    hyps = (("h", ShapeVerdict(hyp_status, witness=None if hyp_status is Status.PASS else 1.0,
                               margin=1.0 if hyp_status is Status.PASS else -1.0)),)
    status = OrderStatus.FAILS if conclusion_margin < 0 else OrderStatus.HOLDS
    c = OrderVerdict(Relation.ST, status, witness=1.0 if conclusion_margin < 0 else None,
                     margin=conclusion_margin)
    return ConditionReport("T", hyps, (Relation.ST, Side.Y_NSTAR, Side.X_N), c)


class TestBuiltins:
    def test_six_examples(self):
        assert [n for n, _, _ in BUILTINS] == ["ex_3_1", "ce_3_1", "ex_3_2", "ex_3_4", "ce_3_2", "ex_3_5"]

    @pytest.mark.parametrize("name,scenario,expect", BUILTINS, ids=[b[0] for b in BUILTINS])
    def test_expectation(self, name, scenario, expect):
        r = evaluate_theorem(expect.theorem_id, scenario)
        assert r.conclusion_verdict.status is expect.conclusion
        assert set(r.failing) == expect.failing
        assert r.consistent

    def test_ex_3_1_all_pass(self):
        r = evaluate_theorem("MAX_ST_COMBINED", builtin("ex_3_1"))
        assert r.all_pass and r.conclusion_verdict.holds

    def test_ce_3_1_reported_failures(self):
        r = evaluate_theorem("MAX_ST_COMBINED", builtin("ce_3_1"))
        assert {"lambda, mu in D+", "r~1 <= r~2"} <= set(r.failing)
        assert r.conclusion_verdict.fails and not r.red_flag

    def test_ex_3_5_all_pass(self):
        r = evaluate_theorem("MIN_HR_COMBINED", builtin("ex_3_5"))
        assert r.all_pass and r.conclusion_verdict.holds

    def test_unknown_builtin(self):
        with pytest.raises(InvalidInput):
            builtin("ex_9_9")


class TestRegistry:
    def test_ids_cover_both_extremes(self):
        ids = theorem_ids()
        assert {t.extreme for t in REGISTRY.values()} == {Extreme.MAX, Extreme.MIN}
        assert set(ids) == set(REGISTRY)
        assert len(theorem_ids(include_aliases=True)) > len(ids)

    def test_unknown_id(self):
        with pytest.raises(InvalidInput):
            evaluate_theorem("NOPE", builtin("ex_3_1"))

    def test_wrong_extreme(self):
        with pytest.raises(InvalidInput):
            evaluate_theorem("MIN_ST_COMBINED", builtin("ex_3_1"))

    def test_alias_resolution(self):
        s = builtin("ex_3_1")  # lambda = (5, 2) is decreasing
        assert resolve("MAX_ST_SAME_N", s).theorem_id == "MAX_ST_SAME_N_DEC"
        with pytest.raises(InvalidInput):
            resolve("MAX_ST_SAME_N")

    def test_disabled_hypotheses(self):
        r = evaluate_theorem("MAX_ST_COMBINED", builtin("ce_3_1"), disabled=["r~1 <= r~2"])
        assert "r~1 <= r~2" not in dict(r.hypotheses)

    def test_mixed_extremes_rejected(self):
        s, t = builtin("ex_3_1"), builtin("ex_3_4")
        with pytest.raises(InvalidInput):
            ComparisonScenario(s.model_X, t.model_Y)

    def test_side_x_nstar(self):
        s = builtin("ex_3_1")
        m = s.side(Side.X_NSTAR)
        assert m.counts == s.model_Y.counts and m.scales == s.model_X.scales


class TestReports:
    def test_red_flag(self):
        assert _report(Status.PASS, -1.0).red_flag
        assert not _report(Status.FAIL, -1.0).red_flag
        assert not _report(Status.PASS, 0.5).red_flag

    def test_noise_level_failure_is_not_red_flag(self):
        assert not _report(Status.PASS, -5e-8).red_flag

    def test_render(self):
        text = evaluate_theorem("MIN_ST_COMBINED", builtin("ce_3_2")).render()
        assert "FAIL" in text and "consistent=True" in text and "no claim" in text


class TestAudit:
    def test_random_scenarios_valid(self):
        rng = np.random.default_rng(7)
        for i in range(20):
            s = random_scenario(rng, Extreme.MIN if i % 2 else Extreme.MAX)
            assert s.model_X.baseline1 == s.model_Y.baseline1

    def test_small_audit(self):
        result = audit(count=4, seed=3, include_builtin=False, relations=[Relation.ST])
        assert result.reports and not result.red_flags and not result.robust_failures
        assert all(REGISTRY[r.theorem_id].relation is Relation.ST for _, r in result.reports)


class TestSchur:
    def test_sum_of_squares_convex(self):
        pairs = [((2, 2), (3, 1)), ((1, 1, 4), (0, 0, 6)), ((1, 2), (5, 5))]
        v = schur_spot_check(lambda v: float(np.sum(v ** 2)), pairs)
        assert v.passed

    def test_concave_fails_as_convex(self):
        v = schur_spot_check(lambda v: float(np.sum(np.sqrt(v))), [((2, 2), (4, 0))])
        assert v.failed

    def test_no_ordered_pairs(self):
        v = schur_spot_check(lambda v: 0.0, [((1, 2), (5, 5))])
        assert v.status is Status.INCONCLUSIVE
