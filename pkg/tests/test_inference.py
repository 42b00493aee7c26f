"""Tests for the interaction tests, power formulas, and kappa_max inversion.

Reference values marked as oracle pins were computed independently of the
package at 40-digit precision (normal CDF via erfc, bivariate tails via
conditional-normal quadrature); regenerate with
tests/oracles/gen_inference_oracles.py.  The kappa_max checks use a second
independent oracle: the boundary crossing solved in closed form as a
quadratic in kappa.
"""

import math

import numpy as np
import pytest

from qualint.inference import (
    EstimatePair,
    KappaMaxResult,
    LocalAlternative,
    SubgroupEstimate,
    TestResult,
    _omnibus_zero_point_quantile,
    _rd_zero_point_quantile,
    gail_simon_test,
    kappa_max,
    omnibus_local_power,
    omnibus_null_tail,
    omnibus_region_contains_alternative,
    omnibus_statistic,
    omnibus_test,
    pn_region_contains_alternative,
    rd_local_power,
    rd_null_nu,
    rd_null_quantile,
    rd_null_tail,
    rd_power_approx,
    rd_statistic,
    rd_test,
)

# ---------------------------------------------------------------------------
# frozen oracle values (see module docstring)
# ---------------------------------------------------------------------------

GS_P_AT_STAT4 = 0.02275013194817920720028
RD_EXAMPLE_STAT = 2.236067977499789696409
RD_EXAMPLE_BOUNDARY = 0.0253473186774682639316
RD_EXAMPLE_ZERO_TAIL = 8.464792848632235202723e-8
RD_NULL_TAIL_T1 = 0.006875519781155434899534
RD_ZERO_QUANTILE_K2 = 0.6509831226845572976891
OMNI_NULL_TAIL_T1 = 0.1952730381631155997241
OMNI_EXAMPLE_BOUNDARY = 0.003645179045767820740716
OMNI_EXAMPLE_ZERO_TAIL = 0.002340445124580732098325
OMNI_ZERO_QUANTILE_K110 = 1.920589407282249775454
Z95 = 1.644853626951472714864
Z975 = 1.959963984540054235525
RD_LOCAL_POWER_PIN = 0.5391436796729353847474
RD_POWER_APPROX_PIN = 0.9880009406182866028285
OMNI_LOCAL_POWER_PIN = 0.9999999998518088611076


def pair(e1, s1, e2, s2):
    return EstimatePair(SubgroupEstimate(e1, s1), SubgroupEstimate(e2, s2))


def random_pairs(rng, count, se_low=0.05, se_high=2.0):
    for _ in range(count):
        yield pair(
            rng.normal(scale=2.0),
            rng.uniform(se_low, se_high),
            rng.normal(scale=2.0),
            rng.uniform(se_low, se_high),
        )


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


class TestDomainTypes:
    def test_subgroup_estimate_validation(self):
        good = SubgroupEstimate(0.5, 0.1, sample_size=20)
        assert good.estimate == 0.5 and good.sample_size == 20
        with pytest.raises(ValueError):
            SubgroupEstimate(math.nan, 0.1)
        with pytest.raises(ValueError):
            SubgroupEstimate(math.inf, 0.1)
        with pytest.raises(ValueError):
            SubgroupEstimate(0.5, 0.0)
        with pytest.raises(ValueError):
            SubgroupEstimate(0.5, -0.1)
        with pytest.raises(ValueError):
            SubgroupEstimate(0.5, 1e-301)
        with pytest.raises(ValueError):
            SubgroupEstimate(0.5, math.inf)
        with pytest.raises(ValueError):
            SubgroupEstimate(0.5, 0.1, sample_size=0)

    def test_estimate_pair_labels(self):
        p = EstimatePair(
            SubgroupEstimate(1, 1), SubgroupEstimate(2, 1), labels=["a", "b"]
        )
        assert p.labels == ("a", "b")
        with pytest.raises(ValueError):
            EstimatePair(
                SubgroupEstimate(1, 1), SubgroupEstimate(2, 1), labels=("only",)
            )
        with pytest.raises(TypeError):
            EstimatePair(SubgroupEstimate(1, 1), (2.0, 1.0))

    def test_test_result_invariants_enforced(self):
        comps = {"normal_boundary": 0.04, "zero_point": 0.01}
        ok = TestResult(1.5, 0.04, comps, True, 0.05)
        assert ok.p_value == max(ok.components.values())
        with pytest.raises(ValueError):
            TestResult(1.5, 0.01, comps, True, 0.05)  # p below max component
        with pytest.raises(ValueError):
            TestResult(1.5, 0.04, comps, False, 0.05)  # flag contradicts p < alpha
        with pytest.raises(ValueError):
            TestResult(1.5, 0.04, {}, True, 0.05)

    def test_kappa_max_result_invariants_enforced(self):
        KappaMaxResult(1.0, 0.05, "none")
        KappaMaxResult(1.7, 0.05, "normal_boundary", roots=(1.7, math.inf))
        with pytest.raises(ValueError):
            KappaMaxResult(1.7, 0.05, "none")
        with pytest.raises(ValueError):
            KappaMaxResult(1.7, 0.05, "normal_boundary", roots=(1.8, 2.0))
        with pytest.raises(ValueError):
            KappaMaxResult(1.7, 0.05, "whatever", roots=(1.7, 2.0))

    def test_local_alternative_validation(self):
        LocalAlternative(1.0, -1.0, 1.0, 2.0, 0.3)
        for lam in (0.0, 1.0, -0.1, 1.1):
            with pytest.raises(ValueError):
                LocalAlternative(1.0, -1.0, 1.0, 2.0, lam)
        with pytest.raises(ValueError):
            LocalAlternative(1.0, -1.0, 0.0, 2.0, 0.3)
        with pytest.raises(ValueError):
            LocalAlternative(math.inf, -1.0, 1.0, 2.0, 0.3)


# ---------------------------------------------------------------------------
# crossover test
# ---------------------------------------------------------------------------


class TestCrossover:
    def test_region_predicate(self):
        assert pn_region_contains_alternative(pair(2, 1, -1, 1))
        assert pn_region_contains_alternative(pair(-1, 1, 2, 1))
        assert not pn_region_contains_alternative(pair(2, 1, 1, 1))
        assert not pn_region_contains_alternative(pair(0, 1, 3, 1))
        assert not pn_region_contains_alternative(pair(-2, 1, -3, 1))

    def test_opposite_signs_example(self):
        res = gail_simon_test(pair(2, 1, -2, 1), 0.05)
        assert res.statistic == 4.0
        assert res.p_value == pytest.approx(GS_P_AT_STAT4, abs=1e-14)
        assert res.rejected
        assert set(res.components) == {"half_chi2"}

    def test_same_sign_is_null(self):
        res = gail_simon_test(pair(2, 1, 1, 1), 0.05)
        assert res.statistic == 0.0
        assert res.p_value == 1.0
        assert not res.rejected

    def test_smaller_standardized_estimate_wins(self):
        res = gail_simon_test(pair(1, 0.5, -3, 1), 0.05)
        assert res.statistic == pytest.approx(4.0, abs=1e-12)
        assert res.p_value == pytest.approx(GS_P_AT_STAT4, abs=1e-14)

    def test_alpha_domain(self):
        with pytest.raises(ValueError):
            gail_simon_test(pair(2, 1, -2, 1), 0.0)
        with pytest.raises(ValueError):
            gail_simon_test(pair(2, 1, -2, 1), 1.0)


# ---------------------------------------------------------------------------
# relative-difference statistic and tails
# ---------------------------------------------------------------------------


class TestRdStatistic:
    def test_closed_form_example(self):
        t = rd_statistic(pair(1.0, 0.2, 0.3, 0.2), 2.0)
        assert t == pytest.approx(0.4 / math.sqrt(0.2), abs=1e-9)

    def test_zero_pair(self):
        assert rd_statistic(pair(0.0, 1.0, 0.0, 2.0), 3.0) == 0.0

    def test_depends_only_on_absolute_estimates(self):
        t_pos = rd_statistic(pair(1.0, 0.2, 0.3, 0.2), 2.0)
        t_mix = rd_statistic(pair(0.3, 0.2, -1.0, 0.2), 2.0)
        assert t_pos == t_mix

    def test_tie_takes_smaller_assignment(self):
        # |estimates| tie at 1; the two assignments give -1/sqrt(1.09) and
        # -1/sqrt(0.61); the smaller (more negative) one must be returned.
        t = rd_statistic(pair(1.0, 0.3, -1.0, 0.5), 2.0)
        assert t == pytest.approx(-1.0 / math.sqrt(0.61), abs=1e-12)

    def test_kappa_one_is_fold_distance(self):
        t = rd_statistic(pair(1.0, 0.5, -0.2, 0.5), 1.0)
        assert t == pytest.approx(0.8 / math.sqrt(0.5), abs=1e-12)
        assert t >= 0.0

    def test_kappa_domain(self):
        with pytest.raises(ValueError):
            rd_statistic(pair(1, 1, 0, 1), 0.99)
        with pytest.raises(ValueError):
            rd_statistic(pair(1, 1, 0, 1), math.nan)

    def test_strictly_decreasing_in_kappa_when_min_positive(self):
        p = pair(1.3, 0.4, 0.5, 0.3)
        kappas = np.linspace(1.0, 8.0, 50)
        values = [rd_statistic(p, k) for k in kappas]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_nonincreasing_in_kappa_when_min_zero(self):
        p = pair(1.3, 0.4, 0.0, 0.3)
        values = [rd_statistic(p, k) for k in np.linspace(1.0, 8.0, 50)]
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert all(v > 0 for v in values)


class TestRdNullNu:
    def test_examples(self):
        assert rd_null_nu(1.0, 0.7, 0.7) == (0.0, 0.0)
        nu1, nu2 = rd_null_nu(2.0, 1.0, 1.0)
        assert nu1 == pytest.approx(-0.6, abs=1e-15)
        assert nu2 == pytest.approx(-0.6, abs=1e-15)
        nu1, nu2 = rd_null_nu(2.0, 1.0, 2.0)
        assert nu1 == pytest.approx(-15.0 / 17.0, abs=1e-15)
        assert nu2 == 0.0

    def test_scale_free(self):
        for c in (1e-6, 3.7, 1e6):
            assert rd_null_nu(2.5, 0.3 * c, 1.1 * c) == pytest.approx(
                rd_null_nu(2.5, 0.3, 1.1), abs=1e-12
            )

    def test_bounds_and_domain(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            k = rng.uniform(1.0, 50.0)
            se1, se2 = rng.uniform(0.01, 10.0, size=2)
            nu1, nu2 = rd_null_nu(k, se1, se2)
            assert -1.0 <= nu1 <= 1.0 and -1.0 <= nu2 <= 1.0
            # at most one of the two can be positive once kappa > 1
            assert not (nu1 > 0.0 and nu2 > 0.0)
        with pytest.raises(ValueError):
            rd_null_nu(2.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            rd_null_nu(0.5, 1.0, 1.0)

    def test_nu2_negates_at_equal_se(self):
        # at se1 = se2 both correlations coincide: (1-k^2)/(1+k^2)
        for k in (1.5, 2.0, 4.0):
            nu1, nu2 = rd_null_nu(k, 0.8, 0.8)
            expected = (1 - k * k) / (1 + k * k)
            assert nu1 == pytest.approx(expected, abs=1e-15)
            assert nu2 == pytest.approx(expected, abs=1e-15)


class TestRdNullTail:
    def test_oracle_pin(self):
        assert rd_null_tail(1.0, 2.0, 1.0, 1.0) == pytest.approx(
            RD_NULL_TAIL_T1, abs=1e-14
        )

    def test_near_zero_limit_at_kappa_one(self):
        # with kappa = 1 and equal ses both correlations vanish and the
        # statistic is nonnegative, so nearly all mass sits above 0+
        assert rd_null_tail(1e-10, 1.0, 1.0, 1.0) == pytest.approx(1.0, abs=1e-9)

    def test_far_tail_is_negligible(self):
        for k, se1, se2 in [(1.5, 1, 1), (2, 0.5, 2), (4, 2, 0.5)]:
            assert rd_null_tail(10.0, k, se1, se2) < 1e-8

    def test_strictly_decreasing_in_t(self):
        grid = np.linspace(0.05, 4.0, 60)
        vals = [rd_null_tail(t, 2.0, 1.0, 0.5) for t in grid]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain_error(self):
        with pytest.raises(ValueError):
            rd_null_tail(0.0, 2.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            rd_null_tail(-1.0, 2.0, 1.0, 1.0)


class TestRdTest:
    def test_example_components(self):
        res = rd_test(pair(1.0, 0.2, 0.0, 0.2), 2.0, 0.05)
        assert res.statistic == pytest.approx(RD_EXAMPLE_STAT, abs=1e-12)
        assert res.components["normal_boundary"] == pytest.approx(
            RD_EXAMPLE_BOUNDARY, abs=1e-14
        )
        assert res.components["zero_point"] == pytest.approx(
            RD_EXAMPLE_ZERO_TAIL, abs=1e-12
        )
        assert res.p_value == max(res.components.values())
        assert res.rejected

    def test_null_region_estimate(self):
        res = rd_test(pair(0.5, 0.2, 0.5, 0.2), 2.0, 0.05)
        assert res.statistic < 0.0
        assert res.p_value == 1.0
        assert res.components == {"normal_boundary": 1.0, "zero_point": 1.0}
        assert not res.rejected

    def test_degenerate_zero_pair(self):
        res = rd_test(pair(0.0, 0.2, 0.0, 0.2), 2.0, 0.05)
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_kappa_must_exceed_one(self):
        with pytest.raises(ValueError):
            rd_test(pair(1, 1, 0, 1), 1.0, 0.05)

    def test_p_value_nondecreasing_in_kappa(self):
        rng = np.random.default_rng(21)
        for p in random_pairs(rng, 25):
            pvals = [rd_test(p, k, 0.05).p_value for k in (1.2, 1.5, 2, 3, 5, 8)]
            assert all(a <= b + 1e-12 for a, b in zip(pvals, pvals[1:]))


class TestRdNullQuantile:
    def test_normal_point_dominates(self):
        q = rd_null_quantile(2.0, 1.0, 1.0, 0.05)
        assert q == pytest.approx(Z975, abs=1e-9)

    def test_zero_point_root_self_consistent(self):
        root = _rd_zero_point_quantile(2.0, 1.0, 1.0, 0.05)
        assert root == pytest.approx(RD_ZERO_QUANTILE_K2, abs=1e-8)
        assert rd_null_tail(root, 2.0, 1.0, 1.0) == pytest.approx(0.05, abs=1e-8)

    def test_zero_point_root_degenerate_when_mass_small(self):
        # huge kappa: both correlations approach -1 and the 0+ mass
        # collapses below alpha, so the zero-point quantile is 0
        assert _rd_zero_point_quantile(1e8, 1.0, 1.0, 0.05) == 0.0
        assert rd_null_quantile(1e8, 1.0, 1.0, 0.05) == pytest.approx(Z975, abs=1e-9)

    def test_never_below_normal_point(self):
        for k in (1.5, 2.0, 4.0):
            for r in (0.5, 1.0, 2.0):
                for a in (0.01, 0.05, 0.2):
                    z = rd_null_quantile(k, r, 1.0, a)
                    assert z >= Z975 - 1e-9 or a != 0.05
                    assert rd_null_tail(z + 1e-9, k, r, 1.0) <= a + 1e-9

    def test_domains(self):
        with pytest.raises(ValueError):
            rd_null_quantile(2.0, 1.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            rd_null_quantile(1.0, 1.0, 1.0, 0.05)


# ---------------------------------------------------------------------------
# relative-difference power
# ---------------------------------------------------------------------------


class TestRdPower:
    def test_local_power_oracle_pin(self):
        alt = LocalAlternative(6.0, 0.0, 1.0, 1.0, 0.5)
        assert rd_local_power(alt, 2.0, 0.05) == pytest.approx(
            RD_LOCAL_POWER_PIN, abs=1e-12
        )

    def test_size_at_origin(self):
        alt = LocalAlternative(0.0, 0.0, 1.0, 1.0, 0.5)
        assert rd_local_power(alt, 2.0, 0.05) <= 0.05 + 1e-12

    def test_group_relabel_symmetry(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            c1, c2 = rng.normal(scale=3.0, size=2)
            s1, s2 = rng.uniform(0.5, 2.0, size=2)
            lam = rng.uniform(0.1, 0.9)
            a = rd_local_power(LocalAlternative(c1, c2, s1, s2, lam), 2.0, 0.05)
            b = rd_local_power(
                LocalAlternative(c2, c1, s2, s1, 1.0 - lam), 2.0, 0.05
            )
            assert a == pytest.approx(b, abs=1e-12)

    def test_local_power_matches_monte_carlo(self):
        # independent check of the whole pipeline: draw the limiting normal
        # estimates under the local alternative and run the actual test
        alt = LocalAlternative(6.0, 0.0, 1.0, 1.0, 0.5)
        kappa, alpha, n_draws = 2.0, 0.05, 10_000
        w1, w2 = math.sqrt(1.0 - alt.lam), math.sqrt(alt.lam)
        rng = np.random.default_rng(2024)
        th1 = rng.normal(w1 * alt.c1, w1 * alt.sigma1, size=n_draws)
        th2 = rng.normal(w2 * alt.c2, w2 * alt.sigma2, size=n_draws)
        rate = np.mean(
            [
                rd_test(pair(a, w1 * alt.sigma1, b, w2 * alt.sigma2), kappa, alpha).rejected
                for a, b in zip(th1, th2)
            ]
        )
        analytic = rd_local_power(alt, kappa, alpha)
        mc_se = math.sqrt(analytic * (1 - analytic) / n_draws)
        assert abs(rate - analytic) <= 3 * mc_se

    def test_power_approx_oracle_pin(self):
        p = pair(1.0, 0.1, 0.0, 0.1)
        assert rd_power_approx(p, 2.0, 0.05) == pytest.approx(
            RD_POWER_APPROX_PIN, abs=1e-12
        )

    def test_power_approx_size_at_global_null(self):
        assert rd_power_approx(pair(0.0, 0.3, 0.0, 0.4), 2.0, 0.05) <= 0.05 + 1e-12

    def test_power_approx_scale_invariant(self):
        base = rd_power_approx(pair(1.0, 0.25, -0.2, 0.3), 2.0, 0.05)
        for c in (1e-3, 7.3, 1e4):
            scaled = rd_power_approx(
                pair(1.0 * c, 0.25 * c, -0.2 * c, 0.3 * c), 2.0, 0.05
            )
            assert scaled == pytest.approx(base, abs=1e-10)


# ---------------------------------------------------------------------------
# omnibus test
# ---------------------------------------------------------------------------


class TestOmnibusRegionAndStatistic:
    def test_region_examples(self):
        assert omnibus_region_contains_alternative(pair(1, 1, -1, 1), 2.0)
        assert not omnibus_region_contains_alternative(pair(1, 1, 0.8, 1), 2.0)
        assert omnibus_region_contains_alternative(pair(1, 1, 0.4, 1), 2.0)
        # mirrored clauses
        assert omnibus_region_contains_alternative(pair(-1, 1, -0.4, 1), 2.0)
        assert omnibus_region_contains_alternative(pair(0.4, 1, 1, 1), 2.0)

    def test_statistic_outside_region_is_zero(self):
        assert omnibus_statistic(pair(1, 1, 0.8, 1), 2.0) == 0.0

    def test_statistic_examples(self):
        assert omnibus_statistic(pair(2, 1, -2, 1), 2.0) == pytest.approx(
            7.2, abs=1e-12
        )
        got = omnibus_statistic(pair(1, 0.5, 0.4, 0.5), 2.0)
        assert got == pytest.approx(0.032, abs=1e-15)

    def test_sign_flip_of_both_estimates(self):
        a = omnibus_statistic(pair(1, 0.5, 0.4, 0.5), 2.0)
        b = omnibus_statistic(pair(-1, 0.5, -0.4, 0.5), 2.0)
        assert a == b


class TestOmnibusNullTail:
    def test_collapses_to_chi2_at_kappa_one(self):
        from qualint.distributions import chi2_1_tail

        for t in (0.3, 1.0, 3.84, 7.2):
            for se1, se2 in [(1, 1), (0.4, 1.7)]:
                assert omnibus_null_tail(t, 1.0, se1, se2) == pytest.approx(
                    chi2_1_tail(t), abs=1e-14
                )

    def test_oracle_pin(self):
        assert omnibus_null_tail(1.0, 2.0, 1.0, 1.0) == pytest.approx(
            OMNI_NULL_TAIL_T1, abs=1e-14
        )

    def test_large_kappa_factorizes(self):
        from qualint.distributions import std_normal_cdf

        t = 2.3
        expected = 2.0 * std_normal_cdf(-math.sqrt(t)) ** 2
        assert omnibus_null_tail(t, 1e8, 1.0, 1.0) == pytest.approx(
            expected, rel=1e-6
        )

    def test_domain_error(self):
        with pytest.raises(ValueError):
            omnibus_null_tail(0.0, 2.0, 1.0, 1.0)


class TestOmnibusTest:
    def test_example_components(self):
        res = omnibus_test(pair(2, 1, -2, 1), 2.0, 0.05)
        assert res.statistic == pytest.approx(7.2, abs=1e-12)
        assert res.components["normal_boundary"] == pytest.approx(
            OMNI_EXAMPLE_BOUNDARY, abs=1e-14
        )
        assert res.components["zero_point"] == pytest.approx(
            OMNI_EXAMPLE_ZERO_TAIL, abs=1e-14
        )
        assert res.p_value == max(res.components.values())
        assert res.rejected

    def test_null_region_estimate(self):
        res = omnibus_test(pair(1, 1, 0.8, 1), 2.0, 0.05)
        assert res.statistic == 0.0
        assert res.p_value == 1.0
        assert not res.rejected

    def test_collapse_to_crossover_test(self):
        rng = np.random.default_rng(77)
        for _ in range(100):
            e1 = rng.uniform(0.1, 3.0)
            e2 = -rng.uniform(0.1, 3.0)
            s1, s2 = rng.uniform(0.2, 1.5, size=2)
            p = pair(e1, s1, e2, s2)
            big = omnibus_test(p, 1e6, 0.05).p_value
            gs = gail_simon_test(p, 0.05).p_value
            assert abs(big - gs) < 1e-4


class TestOmnibusPower:
    def test_size_at_origin(self):
        alt = LocalAlternative(0.0, 0.0, 1.0, 1.0, 0.5)
        assert omnibus_local_power(alt, 2.0, 0.05) <= 0.05 + 1e-12

    def test_oracle_pin(self):
        alt = LocalAlternative(6.0, -6.0, 1.0, 1.0, 0.5)
        assert omnibus_local_power(alt, 2.0, 0.05) == pytest.approx(
            OMNI_LOCAL_POWER_PIN, abs=1e-12
        )

    def test_zero_point_quantile_binds_near_kappa_one(self):
        root = _omnibus_zero_point_quantile(1.1, 1.0, 1.0, 0.05)
        assert root == pytest.approx(OMNI_ZERO_QUANTILE_K110, abs=1e-8)
        assert root > Z95
        # when the zero-point root binds, size at the origin is exactly alpha
        alt = LocalAlternative(0.0, 0.0, 1.0, 1.0, 0.5)
        assert omnibus_local_power(alt, 1.1, 0.05) == pytest.approx(0.05, abs=1e-8)

    def test_monotone_in_c1_for_fixed_nonpositive_c2(self):
        powers = [
            omnibus_local_power(LocalAlternative(c1, -2.0, 1.0, 1.0, 0.5), 2.0, 0.05)
            for c1 in (0.0, 1.0, 2.0, 3.0, 4.0, 6.0)
        ]
        assert all(a <= b + 1e-12 for a, b in zip(powers, powers[1:]))

    def test_local_power_matches_monte_carlo(self):
        alt = LocalAlternative(6.0, -6.0, 1.0, 1.0, 0.5)
        kappa, alpha, n_draws = 2.0, 0.05, 10_000
        w1, w2 = math.sqrt(1.0 - alt.lam), math.sqrt(alt.lam)
        rng = np.random.default_rng(515)
        th1 = rng.normal(w1 * alt.c1, w1 * alt.sigma1, size=n_draws)
        th2 = rng.normal(w2 * alt.c2, w2 * alt.sigma2, size=n_draws)
        rate = np.mean(
            [
                omnibus_test(
                    pair(a, w1 * alt.sigma1, b, w2 * alt.sigma2), kappa, alpha
                ).rejected
                for a, b in zip(th1, th2)
            ]
        )
        analytic = omnibus_local_power(alt, kappa, alpha)
        # analytic power is ~1 here; allow an absolute floor on the band
        band = max(3 * math.sqrt(analytic * (1 - analytic) / n_draws), 3e-4)
        assert abs(rate - analytic) <= band


# ---------------------------------------------------------------------------
# kappa_max
# ---------------------------------------------------------------------------

# printed two-decimal inputs and summaries from the breast-cancer example
TABLE_ROWS = [
    ("GRB2", -0.06, 0.31, -1.66, 0.68, 2.04),
    ("APC", 1.34, 0.32, -0.09, 0.33, 1.91),
    ("BAX", -1.05, 0.24, 0.04, 0.36, 1.53),
    ("PIK3CA", 1.13, 0.28, 0.14, 0.32, 1.51),
    ("SOS2", 1.13, 0.36, -0.10, 0.37, 1.33),
    ("MAP2K2", -0.87, 0.27, 0.03, 0.35, 1.22),
    ("GADD45G", -0.52, 0.13, -0.07, 0.19, 1.21),
    ("HES5", 0.02, 0.20, 0.51, 0.18, 1.19),
    ("WNT2", -0.36, 0.09, 0.00, 0.17, 1.14),
    ("DLL4", 0.09, 0.20, 0.68, 0.27, 1.10),
    ("FRAT2", -1.22, 0.31, -0.45, 0.29, 1.08),
    ("SOS1", 1.19, 0.30, -0.34, 0.42, 1.01),
]


def boundary_root_quadratic(e1, s1, e2, s2, alpha):
    """Closed-form oracle for the boundary inversion root.

    The statistic equals z := Phi^|-1|(1 - alpha/2) exactly where
    (a_max - k a_min)^2 = z^2 (v_max + k^2 v_min) with a positive
    numerator, which is a quadratic in k.  Independent of the package's
    iterative search.
    """
    z = Z95  # alpha = 0.10 two-sided
    a1, a2 = abs(e1), abs(e2)
    if a1 >= a2:
        amax, vmax, amin, vmin = a1, s1 * s1, a2, s2 * s2
    else:
        amax, vmax, amin, vmin = a2, s2 * s2, a1, s1 * s1
    qa = amin * amin - z * z * vmin
    qb = -2.0 * amax * amin
    qc = amax * amax - z * z * vmax
    candidates = [r.real for r in np.roots([qa, qb, qc]) if abs(r.imag) < 1e-12]
    valid = [
        k
        for k in candidates
        if k > 1.0
        and (amax - k * amin) > 0.0
        and abs((amax - k * amin) / math.sqrt(vmax + k * k * vmin) - z) < 1e-6
    ]
    assert len(valid) == 1, f"ambiguous quadratic root set {candidates}"
    return valid[0]


class TestKappaMax:
    def test_table_rows_within_print_tolerance(self):
        for name, e1, s1, e2, s2, printed in TABLE_ROWS:
            res = kappa_max(pair(e1, s1, e2, s2), 0.10)
            assert abs(res.kappa_max - printed) <= 0.1, name

    def test_matches_closed_form_boundary_root(self):
        for name, e1, s1, e2, s2, _ in TABLE_ROWS:
            res = kappa_max(pair(e1, s1, e2, s2), 0.10)
            oracle = boundary_root_quadratic(e1, s1, e2, s2, 0.10)
            assert res.kappa_max == pytest.approx(oracle, abs=5e-6), name
            assert res.binding_root == "normal_boundary"
            assert res.roots is not None
            pi1, pi2 = res.roots
            assert res.kappa_max == min(pi1, pi2)
            assert pi2 > pi1  # the zero-point root never binds here

    def test_weak_pair_convention(self):
        res = kappa_max(pair(0.1, 1.0, 0.1, 1.0), 0.10)
        assert res.kappa_max == 1.0
        assert res.binding_root == "none"
        assert res.roots is None

    def test_zero_point_root_can_be_unbounded(self):
        res = kappa_max(pair(-0.06, 0.31, -1.66, 0.68), 0.10)
        assert res.roots is not None and math.isinf(res.roots[1])

    def test_inversion_consistency(self):
        for name, e1, s1, e2, s2, _ in TABLE_ROWS:
            res = kappa_max(pair(e1, s1, e2, s2), 0.10)
            if res.kappa_max <= 1.0 + 1e-6:
                continue
            below = rd_test(pair(e1, s1, e2, s2), res.kappa_max - 1e-6, 0.10)
            above = rd_test(pair(e1, s1, e2, s2), res.kappa_max + 1e-6, 0.10)
            assert below.rejected, name
            assert not above.rejected, name

    def test_tighter_alpha_shrinks_kappa_max(self):
        p = pair(-0.06, 0.31, -1.66, 0.68)
        loose = kappa_max(p, 0.10).kappa_max
        tight = kappa_max(p, 0.05).kappa_max
        assert tight <= loose

    def test_alpha_domain(self):
        with pytest.raises(ValueError):
            kappa_max(pair(1, 1, -1, 1), 0.5)
