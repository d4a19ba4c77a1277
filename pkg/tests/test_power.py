"""Power-core tests.

Size and power expectations are frozen from root-finding on the quadrature /
scipy noncentral-t power function (independent of this package); entries note
the frozen value where it is not a published one.
"""

import math

import pytest

from pilotplan.power import (
    EffectSpec,
    ONE_SAMPLE,
    TWO_SAMPLE,
    T_ITERATIVE,
    Z_APPROX,
    TestDesign,
    arcsine_effect,
    effect_for_n,
    main_sample_size,
    mu_for_n,
    power_at,
    required_n,
    sigma_for_n,
)

TWO = TestDesign(TWO_SAMPLE, 0.05)
ONE = TestDesign(ONE_SAMPLE, 0.05)


class TestMainSampleSize:
    def test_low_back_pain_design(self):
        # exact requirement 157.7199 -> smallest adequate N is 158
        assert main_sample_size(EffectSpec(1, 4), TWO, 0.6) == 158

    def test_medium_effect_at_threshold_power(self):
        # exact requirement 40.1695: power(40) = 0.59815 < 0.6, so the
        # smallest adequate N is 41 (40 is the nearest-integer report)
        assert main_sample_size(EffectSpec(2, 4), TWO, 0.6) == 41
        assert round(required_n(EffectSpec(2, 4), TWO, 0.6)) == 40

    def test_small_effect_main_sizes(self):
        assert main_sample_size(EffectSpec(0.2), TWO, 0.6) == 246
        assert main_sample_size(EffectSpec(0.2), TWO, 0.8) == 394

    def test_reference_sizes_at_target_power(self):
        assert main_sample_size(EffectSpec(0.5), TWO, 0.8) == 64
        assert main_sample_size(EffectSpec(0.8), TWO, 0.8) == 26

    def test_z_mode_closed_form(self):
        # ceil(2 * (1.959964 + 0.841621)^2 * 16) = ceil(156.76) = 157
        assert main_sample_size(EffectSpec(1, 4), TWO, 0.6, Z_APPROX) == 157
        assert main_sample_size(EffectSpec(0.5), TWO, 0.8, Z_APPROX) == 63

    def test_required_n_fractional(self):
        # frozen root of the exact power curve: 157.71990592864
        assert required_n(EffectSpec(1, 4), TWO, 0.6) == pytest.approx(
            157.719906, abs=1e-4)
        assert required_n(EffectSpec(0.5), TWO, 0.6) == pytest.approx(
            40.169528, abs=1e-4)

    def test_zero_effect_rejected(self):
        with pytest.raises(ValueError):
            main_sample_size(EffectSpec(0.0, 1.0), TWO, 0.8)

    def test_power_bounds_rejected(self):
        for bad in (0.0, 1.0):
            with pytest.raises(ValueError):
                main_sample_size(EffectSpec(0.5), TWO, bad)


class TestPowerAt:
    def test_threshold_design_power(self):
        assert power_at(158, EffectSpec(0.25), TWO) == pytest.approx(0.60, abs=0.01)
        # frozen exact value 0.6007633
        assert power_at(158, EffectSpec(0.25), TWO) == pytest.approx(0.6007633, abs=1e-6)

    def test_target_design_power(self):
        assert power_at(64, EffectSpec(0.5), TWO) == pytest.approx(0.80, abs=0.01)

    def test_saturates(self):
        assert power_at(1e6, EffectSpec(0.25), TWO) > 0.999

    def test_increasing_in_n(self):
        vals = [power_at(n, EffectSpec(0.3), TWO) for n in range(5, 400, 7)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            power_at(1, EffectSpec(0.5), TWO)


class TestInverseSolves:
    def test_sigma_for_low_back_pain(self):
        # both quantile modes stay inside the published 3.16 +/- 0.02
        assert sigma_for_n(158, EffectSpec(1), TWO, 0.8) == pytest.approx(3.16, abs=0.02)
        assert sigma_for_n(158, EffectSpec(1), TWO, 0.8, T_ITERATIVE) == pytest.approx(
            3.16, abs=0.02)

    def test_sigma_inverse_consistency(self):
        for sigma, delta, power in ((4.0, 1.0, 0.8), (2.5, 1.5, 0.7), (1.0, 0.4, 0.9)):
            n = main_sample_size(EffectSpec(delta, sigma), TWO, power, Z_APPROX)
            back = sigma_for_n(n, EffectSpec(delta), TWO, power)
            n_back = main_sample_size(EffectSpec(delta, back), TWO, power, Z_APPROX)
            assert abs(n_back - n) <= 1

    def test_sigma_scale_equivariance(self):
        a = sigma_for_n(40, EffectSpec(1.0), TWO, 0.8)
        b = sigma_for_n(40, EffectSpec(2.0), TWO, 0.8)
        assert b == pytest.approx(2.0 * a, rel=1e-12)

    def test_mu_for_reference_sizes(self):
        assert mu_for_n(40, 1.0, TWO, 0.8) == pytest.approx(0.63, abs=0.01)
        assert mu_for_n(246, 1.0, TWO, 0.8) == pytest.approx(0.253, abs=0.002)
        assert mu_for_n(246, 1.0, TWO, 0.8, T_ITERATIVE) == pytest.approx(0.253, abs=0.002)

    def test_mu_monotone_in_power(self):
        assert mu_for_n(40, 1.0, TWO, 0.8) > mu_for_n(40, 1.0, TWO, 0.6)

    def test_effect_for_n_matches_power(self):
        for n in (10, 64, 246):
            d = effect_for_n(n, TWO, 0.8, T_ITERATIVE)
            assert power_at(n, EffectSpec(d), TWO) == pytest.approx(0.8, abs=1e-9)


class TestArcsineEffect:
    def test_fall_prevention_value(self):
        # 2 asin(sqrt(.5)) - 2 asin(sqrt(.4)) = 0.2013579208 exactly
        spec = arcsine_effect(0.5, 0.4)
        assert spec.sigma == 1.0
        assert spec.effect == pytest.approx(0.2013579208, abs=1e-9)

    def test_equal_proportions(self):
        assert arcsine_effect(0.3, 0.3).effect == 0.0

    def test_endpoint_identity(self):
        assert arcsine_effect(1.0, 0.0).effect == pytest.approx(math.pi, rel=1e-15)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            arcsine_effect(1.2, 0.4)
        with pytest.raises(ValueError):
            arcsine_effect(0.4, 0.5)
        with pytest.raises(ValueError):
            arcsine_effect(0.5, -0.1)


class TestInvariants:
    GRID = [(0.2, 0.8), (0.25, 0.6), (0.4, 0.7), (0.5, 0.8), (0.8, 0.9), (1.2, 0.75)]

    def test_inverse_pair_property(self):
        # smallest adequate N: power(N) >= target, power(N-1) < target
        for d, power in self.GRID:
            n = main_sample_size(EffectSpec(d), TWO, power)
            assert power_at(n, EffectSpec(d), TWO) >= power
            assert power_at(n - 1, EffectSpec(d), TWO) < power

    def test_scale_invariance_exact(self):
        for d, power in self.GRID:
            base = main_sample_size(EffectSpec(d, 1.0), TWO, power)
            for c in (0.25, 3.0, 17.5):
                assert main_sample_size(EffectSpec(c * d, c), TWO, power) == base

    def test_two_sample_about_twice_one_sample(self):
        for d, power in self.GRID:
            # pure rounding in z mode; t mode also carries the df gap
            # (the one-sample design has half the degrees of freedom)
            nz2 = main_sample_size(EffectSpec(d), TWO, power, Z_APPROX)
            nz1 = main_sample_size(EffectSpec(d), ONE, power, Z_APPROX)
            assert abs(nz2 - 2 * nz1) <= 1
            nt2 = main_sample_size(EffectSpec(d), TWO, power)
            nt1 = main_sample_size(EffectSpec(d), ONE, power)
            assert abs(nt2 - 2 * nt1) <= 5

    def test_z_vs_t_within_two(self):
        for d, power in self.GRID:
            nt = main_sample_size(EffectSpec(d), TWO, power)
            nz = main_sample_size(EffectSpec(d), TWO, power, Z_APPROX)
            if nt >= 20:
                assert abs(nt - nz) <= 2

    def test_one_sided_quantile_convention(self):
        # the sizing uses the alpha/2 quantile: halving alpha to alpha/2
        # directly must give a larger study than the alpha/2-quantile size
        n = main_sample_size(EffectSpec(0.5), TestDesign(TWO_SAMPLE, 0.05), 0.8)
        n_tighter = main_sample_size(EffectSpec(0.5), TestDesign(TWO_SAMPLE, 0.025), 0.8)
        assert n_tighter > n
