import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extremeorder.copula import (
    CustomGenerator,
    GumbelExp,
    Independence,
    LogExp,
    RatioKind,
    Shape,
    check_log_concave,
    check_log_convex,
    check_ratio_shape,
    check_super_additive,
    generator_grid,
    make_generator,
    ratio_function,
)
from extremeorder.errors import CapError, InvalidInput
from extremeorder.numerics import derivative

FAMILIES = [GumbelExp(1.5), GumbelExp(9), LogExp(0.2), LogExp(0.99), Independence()]


class TestInverse:
    def test_gumbel(self):
        assert GumbelExp(9).phi(math.exp(-1)) == pytest.approx(1.0, rel=1e-12)

    def test_independence(self):
        assert Independence().phi(0.5) == pytest.approx(math.log(2), rel=1e-14)

    def test_log_exp_round_trip(self):
        u = math.exp((1 - math.e) / 0.2)
        assert LogExp(0.2).phi(u) == pytest.approx(1.0, rel=1e-12)

    def test_phi_at_one(self):
        assert GumbelExp(3).phi(1.0) == 0.0

    def test_cap(self):
        with pytest.raises(CapError):
            GumbelExp(2).phi(1e-300)

    def test_above_one(self):
        with pytest.raises(InvalidInput):
            Independence().phi(1.5)

    @pytest.mark.parametrize("g", FAMILIES, ids=lambda g: g.describe())
    def test_round_trip_on_grid(self, g):
        # in probability space the round trip is limited by how finely u
        # near 1 is represented, so points with 1 - psi < 1e-6 are skipped
        x = generator_grid(g, 300).points
        x = x[g.one_minus_psi(x) >= 1e-6]
        np.testing.assert_allclose(g.phi(g.psi(x)), x, rtol=1e-9)

    @pytest.mark.parametrize("g", FAMILIES, ids=lambda g: g.describe())
    def test_log_round_trip_full_grid(self, g):
        x = generator_grid(g, 300).points
        np.testing.assert_allclose(g.phi_neglog(-g.log_psi(x)), x, rtol=1e-12)

    @pytest.mark.parametrize("g", FAMILIES, ids=lambda g: g.describe())
    def test_neglog_matches_phi(self, g):
        u = np.array([1e-200, 1e-8, 0.3, 0.999999])
        np.testing.assert_allclose(g.phi_neglog(-np.log(u)), g.phi(u), rtol=1e-12)


class TestConstruction:
    def test_make_generator(self):
        assert make_generator("gumbel_exp", 9) == GumbelExp(9)
        assert make_generator("independence") == Independence()

    def test_missing_theta(self):
        with pytest.raises(InvalidInput):
            make_generator("log_exp")

    def test_gumbel_theta_below_one(self):
        with pytest.raises(InvalidInput):
            GumbelExp(0.5)

    def test_log_exp_not_convex(self):
        with pytest.raises(InvalidInput):
            LogExp(1.5)

    def test_same_as(self):
        assert GumbelExp(9).same_as(GumbelExp(9.0))
        assert not GumbelExp(9).same_as(GumbelExp(10))

    def test_custom_matches_closed_form(self):
        custom = CustomGenerator(lambda x: math.exp(-x) if np.ndim(x) == 0 else np.exp(-x))
        assert custom.phi(0.5) == pytest.approx(math.log(2), rel=1e-9)
        assert float(custom.dlog_psi(1.3)) == pytest.approx(-1.0, rel=1e-6)

    def test_custom_rejects_bad_psi(self):
        with pytest.raises(InvalidInput):
            CustomGenerator(lambda x: 2.0)


class TestDerivatives:
    @pytest.mark.parametrize("g", FAMILIES, ids=lambda g: g.describe())
    def test_dlog_psi(self, g):
        for x in (0.3, 1.0, 2.5):
            assert g.dlog_psi(x) == pytest.approx(derivative(g.log_psi, x), rel=1e-6)

    @pytest.mark.parametrize("g", FAMILIES, ids=lambda g: g.describe())
    def test_psi_prime(self, g):
        for x in (0.3, 1.0, 2.5):
            assert g.psi_prime(x) == pytest.approx(derivative(g.psi, x), rel=1e-6)


    @pytest.mark.parametrize("g", FAMILIES, ids=lambda g: g.describe())
    def test_psi_prime_on_validation_grid(self, g):
        x = generator_grid(g, 200).points
        x = x[(g.psi(x) > 1e-8) & (x > 1e-4)]
        dpsi = g.psi_prime(x)
        assert np.all(dpsi < 0)
        np.testing.assert_allclose(dpsi, derivative(g.psi, x), rtol=1e-5)

    def test_gumbel_one_is_independence(self):
        x = np.geomspace(1e-6, 50, 200)
        np.testing.assert_allclose(GumbelExp(1).psi(x), Independence().psi(x), rtol=1e-14)


class TestShapes:
    def test_gumbel_log_convex(self):
        assert check_log_convex(GumbelExp(9)).passed

    def test_log_exp_log_concave(self):
        assert check_log_concave(LogExp(0.2)).passed
        assert check_log_convex(LogExp(0.2)).failed

    def test_independence_both(self):
        assert check_log_convex(Independence()).passed
        assert check_log_concave(Independence()).passed

    @pytest.mark.parametrize("g", FAMILIES, ids=lambda g: g.describe())
    def test_self_composition_additive(self, g):
        assert check_super_additive(g, g).passed

    def test_gumbel_super_additive(self):
        assert check_super_additive(GumbelExp(10), GumbelExp(9)).passed

    def test_gumbel_sub_additive(self):
        v = check_super_additive(GumbelExp(9), GumbelExp(10))
        assert v.failed and len(v.witness) == 2

    def test_independence_ratio_constant(self):
        v = check_ratio_shape(Independence(), RatioKind.PSI_OVER_DPSI, Shape.DECREASING)
        assert v.passed

    def test_log_exp_one_minus_ratio(self):
        v = check_ratio_shape(LogExp(0.2), RatioKind.ONE_MINUS_PSI_OVER_DPSI, Shape.DECREASING)
        assert v.passed

    def test_log_exp_ratio_of_derivatives(self):
        v = check_ratio_shape(LogExp(0.99), RatioKind.RATIO_OF_DERIVATIVES, Shape.INCREASING)
        assert v.passed

    @pytest.mark.parametrize("g", FAMILIES, ids=lambda g: g.describe())
    def test_ratio_closed_forms(self, g):
        x = np.array([0.2, 0.7, 1.9])
        psi, dpsi = g.psi(x), g.psi_prime(x)
        np.testing.assert_allclose(ratio_function(g, RatioKind.PSI_OVER_DPSI)(x), psi / dpsi,
                                   rtol=1e-12)
        h = lambda t: (1 - g.psi(t)) / g.psi_prime(t)
        np.testing.assert_allclose(ratio_function(g, RatioKind.ONE_MINUS_PSI_OVER_DPSI)(x),
                                   h(x), rtol=1e-10)
        np.testing.assert_allclose(ratio_function(g, RatioKind.PRODUCT_RULE_TERM)(x),
                                   h(x) * derivative(h, x), rtol=1e-5)
        np.testing.assert_allclose(ratio_function(g, RatioKind.RATIO_OF_DERIVATIVES)(x),
                                   derivative(h, x) * dpsi / psi, rtol=1e-5)


@settings(max_examples=60, deadline=None)
@given(st.floats(1.0, 20.0), st.floats(1e-6, 50.0))
def test_gumbel_round_trip_property(theta, x):
    g = GumbelExp(theta)
    assert g.phi_neglog(-g.log_psi(x)) == pytest.approx(x, rel=1e-12)
