import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extremeorder.errors import BracketError, EvaluationError, InvalidInput, QuadratureError
from extremeorder.numerics import (
    Curvature,
    Direction,
    ShapeVerdict,
    Spacing,
    Status,
    both,
    check_convex,
    check_dominance,
    check_monotone,
    cumulative_integrate,
    derivative,
    either,
    find_root,
    integrate,
    invert_monotone,
    make_grid,
)


class TestGrid:
    def test_linear(self):
        g = make_grid(1, 10, 10, Spacing.LINEAR)
        np.testing.assert_allclose(g.points, np.arange(1, 11))

    def test_log(self):
        g = make_grid(1e-2, 1e2, 5, Spacing.LOG)
        np.testing.assert_allclose(g.points, [1e-2, 1e-1, 1, 1e1, 1e2], rtol=1e-12)

    def test_exact_endpoints(self):
        g = make_grid(0.3, 7.1, 123)
        assert g.lo == 0.3 and g.hi == 7.1 and len(g) == 123

    @pytest.mark.parametrize("lo,hi,count", [(2, 2, 16), (3, 1, 10), (0, 1, 10), (1, 2, 1)])
    def test_bad_bounds(self, lo, hi, count):
        with pytest.raises(InvalidInput):
            make_grid(lo, hi, count, Spacing.LINEAR)

    def test_points_read_only(self):
        g = make_grid(1, 2, 5)
        with pytest.raises(ValueError):
            g.points[0] = 5.0

    def test_subsample_keeps_ends(self):
        g = make_grid(1, 100, 1000)
        s = g.subsample(11)
        assert s.count == 11 and s.lo == g.lo and s.hi == g.hi


class TestDerivative:
    def test_polynomial(self):
        assert derivative(lambda x: x * x, 3.0) == pytest.approx(6.0, abs=1e-5)

    def test_exp(self):
        assert derivative(math.exp, 0.0) == pytest.approx(1.0, abs=1e-5)

    def test_abs_symmetric(self):
        assert derivative(abs, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_non_finite_raises(self):
        with pytest.raises(EvaluationError):
            derivative(lambda x: math.log(x), 0.0)

    @pytest.mark.parametrize("f,d2,x", [
        (lambda x: x ** 2, lambda x: 2.0, 1.7),
        (np.exp, np.exp, 0.4),
        (np.sin, lambda x: -np.sin(x), 1.1),
    ])
    def test_second_order_matches_iterated(self, f, d2, x):
        iterated = derivative(lambda t: derivative(f, t), x)
        direct = derivative(f, x, order=2)
        assert direct == pytest.approx(iterated, rel=1e-3)
        assert direct == pytest.approx(d2(x), rel=1e-3)

    def test_vectorised(self):
        xs = np.linspace(0.5, 2.0, 7)
        np.testing.assert_allclose(derivative(np.log, xs), 1 / xs, rtol=1e-8)


class TestShapeChecks:
    def test_reciprocal_decreasing(self):
        v = check_monotone(lambda x: 1 / x, make_grid(1, 10, 500), Direction.DECREASING)
        assert v.passed and v.witness is None

    def test_sine_not_increasing(self):
        v = check_monotone(np.sin, make_grid(0.1, 6, 500, Spacing.LINEAR), Direction.INCREASING)
        assert v.failed
        assert v.witness > math.pi / 2 - 0.05

    def test_exponential_reversed_hazard(self):
        f = lambda x: np.exp(-x) / -np.expm1(-x)
        assert check_monotone(f, make_grid(0.01, 20, 2000), Direction.DECREASING).passed

    def test_constant_passes_both_directions(self):
        g = make_grid(1, 5, 50)
        for d in Direction:
            assert check_monotone(lambda x: np.full_like(x, 2.0), g, d).passed

    def test_convex_concave(self):
        assert check_convex(lambda x: x ** 2, make_grid(0.1, 10, 300), Curvature.CONVEX).passed
        assert check_convex(np.log, make_grid(0.1, 10, 300), Curvature.CONCAVE).passed
        assert check_convex(np.log, make_grid(0.1, 10, 300), Curvature.CONVEX).failed

    def test_pareto_xr_decreasing_convex(self):
        # x r(x) = 5 for F = 1 - x^-5; shifted so it is a genuine curve: 5x/(x-1)
        f = lambda x: 5 * x / (x - 1)
        g = make_grid(1.01, 50, 1000)
        assert check_monotone(f, g, Direction.DECREASING).passed
        assert check_convex(f, g, Curvature.CONVEX).passed

    def test_exclusions_counted(self):
        g = make_grid(1, 10, 100, Spacing.LINEAR)
        f = lambda x: np.where(x > 9.5, np.nan, x)
        v = check_monotone(f, g, Direction.INCREASING)
        assert v.passed and v.excluded_count == int((g.points > 9.5).sum())

    def test_too_many_exclusions_inconclusive(self):
        g = make_grid(1, 10, 100, Spacing.LINEAR)
        v = check_monotone(lambda x: np.where(x > 5, np.nan, x), g, Direction.INCREASING)
        assert v.status is Status.INCONCLUSIVE

    def test_dominance(self):
        g = make_grid(0.1, 3, 100)
        assert check_dominance(np.sin, lambda x: x, g).passed
        v = check_dominance(lambda x: x, np.sin, g)
        assert v.failed and v.margin < 0

    def test_precomputed_values(self):
        g = make_grid(1, 2, 10)
        assert check_monotone(np.arange(10.0), g, Direction.INCREASING).passed


class TestVerdictCombinators:
    def test_either_prefers_pass(self):
        p = ShapeVerdict(Status.PASS, margin=0.5)
        f = ShapeVerdict(Status.FAIL, witness=1.0, margin=-1.0)
        assert either(f, p) is p
        assert both(f, p) is f

    def test_from_bool_is_robust(self):
        assert ShapeVerdict.from_bool(True).robust()
        assert ShapeVerdict.from_bool(False).failed

    def test_fail_needs_witness(self):
        with pytest.raises(InvalidInput):
            ShapeVerdict(Status.FAIL)


class TestRoots:
    def test_linear(self):
        assert find_root(lambda x: x - 2, 0, 5) == pytest.approx(2.0, abs=1e-10)

    def test_exponential(self):
        assert find_root(lambda x: math.exp(-x) - 0.5, 0, 5) == pytest.approx(math.log(2), abs=1e-12)

    def test_cubic(self):
        assert find_root(lambda x: x ** 3 - x - 2, 1, 2) == pytest.approx(1.5213797068045676, abs=1e-12)

    def test_no_sign_change(self):
        with pytest.raises(BracketError):
            find_root(lambda x: x * x + 1, -1, 1)

    def test_invert_monotone_vector(self):
        targets = np.linspace(0.05, 0.95, 19)
        xs = invert_monotone(lambda x: -np.expm1(-x), targets, np.full(19, 1e-6), np.full(19, 50.0))
        np.testing.assert_allclose(-np.expm1(-xs), targets, rtol=1e-13)

    def test_invert_monotone_decreasing(self):
        xs = invert_monotone(lambda x: 1 / x, np.array([0.5, 0.25]), np.array([1.0, 1.0]),
                             np.array([10.0, 10.0]), increasing=False)
        np.testing.assert_allclose(xs, [2.0, 4.0], rtol=1e-13)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(min_value=1e-8, max_value=1 - 1e-8))
    def test_invert_round_trip(self, u):
        x = invert_monotone(lambda t: t ** 3, np.array([u]), np.array([0.0]), np.array([1.0]))
        assert float(x[0]) ** 3 == pytest.approx(u, rel=1e-12)


class TestIntegrate:
    def test_identity(self):
        assert integrate(lambda x: x, 0, 1) == pytest.approx(0.5, abs=1e-12)

    def test_constant(self):
        assert integrate(lambda x: np.ones_like(x), 0, 1) == pytest.approx(1.0, abs=1e-12)

    def test_truncated_exponential(self):
        assert integrate(lambda x: np.exp(-x), 0, 40) == pytest.approx(1.0, abs=1e-8)

    def test_reversed_bounds(self):
        assert integrate(np.cos, math.pi / 2, 0) == pytest.approx(-1.0, abs=1e-10)

    def test_cumulative(self):
        cum = cumulative_integrate(lambda x: 2 * x, [0, 1, 2, 3])
        np.testing.assert_allclose(cum, [0, 1, 4, 9], atol=1e-12)

    def test_non_finite_interior(self):
        with pytest.raises(QuadratureError):
            integrate(lambda x: 1 / (x - 0.5), 0, 1)
