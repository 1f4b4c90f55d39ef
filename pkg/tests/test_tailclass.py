"""Hull estimation, class certification, weak-zero certificates."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prodex.engine import expect
from prodex.errors import NotStraddlingError, StraddleNotFoundError
from prodex.functions import Cylinder, eval_function
from prodex.model import (
    ConstantSymbol,
    DescribedPoint,
    HybridMeasure,
    LazyPoint,
    MeasureAssignment,
    modify_point,
    point_coordinate,
)
from prodex.tailclass import (
    UNDETERMINED,
    Z0_CERTIFIED,
    classify,
    construct_weak_zero,
    hull_estimate,
    weak_zero_from_sample,
)

from conftest import (
    all_ones_point,
    all_zeros_point,
    binary_spaces,
    discounted_unit,
    geometric_indicator_envelope,
    geometric_sigma,
    indicator_all_ones,
    mix_cylinder,
    uniform_sigma,
)

F = Fraction
TOL = F(1, 10**9)


class TestHullEstimate:
    def test_indicator_all_ones_depth_one(self):
        f = indicator_all_ones()
        hull = hull_estimate(f, all_ones_point(), 1, binary_spaces())
        assert (hull.lo, hull.hi) == (0, 1)
        assert hull.exhaustive
        assert point_coordinate(hull.witness_min, 1) == 0
        assert point_coordinate(hull.witness_max, 1) == 1
        # witnesses differ from the base only within depth
        for i in range(2, 12):
            assert point_coordinate(hull.witness_min, i) == 1

    def test_constant_function_depth_three(self, sigma_uniform):
        f = Cylinder(1, {(0,): F(5), (1,): F(5)})
        hull = hull_estimate(f, all_zeros_point(), 3, binary_spaces())
        assert (hull.lo, hull.hi) == (5, 5)

    def test_discounted_all_zeros_depth_two(self):
        # max sets both modified coordinates to the unit-score symbol:
        # w_1 + w_2 = 3/4
        f = discounted_unit()
        hull = hull_estimate(f, all_zeros_point(), 2, binary_spaces())
        assert (hull.lo, hull.hi) == (0, F(3, 4))
        assert eval_function(f, hull.witness_max, 4).lo == F(3, 4)

    def test_depth_zero_hull_is_point_value(self):
        f = mix_cylinder()
        x = DescribedPoint((1, 0), ConstantSymbol(0))
        hull = hull_estimate(f, x, 0, binary_spaces())
        assert hull.lo == hull.hi == F(7, 10)

    def test_hull_nesting_in_depth(self):
        f = discounted_unit()
        x = all_zeros_point()
        hulls = [hull_estimate(f, x, m, binary_spaces()) for m in range(5)]
        for inner, outer in zip(hulls, hulls[1:]):
            assert outer.lo <= inner.lo and inner.hi <= outer.hi

    @given(seed=st.integers(min_value=0, max_value=2**32))
    @settings(max_examples=25, deadline=None)
    def test_hull_nesting_randomized(self, seed):
        f = mix_cylinder()
        x = LazyPoint(seed, uniform_sigma())
        hulls = [hull_estimate(f, x, m, binary_spaces()) for m in range(4)]
        for inner, outer in zip(hulls, hulls[1:]):
            assert outer.lo <= inner.lo and inner.hi <= outer.hi

    def test_guided_search_matches_enumeration(self):
        # same inputs through both paths: a budget of 1 forces the guided
        # search, whose achieved endpoints must equal the exhaustive hull
        f = discounted_unit()
        x = modify_point(all_zeros_point(), {2: 1})
        full = hull_estimate(f, x, 4, binary_spaces())
        guided = hull_estimate(f, x, 4, binary_spaces(), enumeration_budget=1)
        assert full.exhaustive and not guided.exhaustive
        assert (guided.lo, guided.hi) == (full.lo, full.hi)

    def test_guided_search_matches_enumeration_indicator(self):
        f = indicator_all_ones()
        x = all_ones_point()
        full = hull_estimate(f, x, 3, binary_spaces())
        guided = hull_estimate(f, x, 3, binary_spaces(), enumeration_budget=1)
        assert (guided.lo, guided.hi) == (full.lo, full.hi) == (0, 1)


class TestClassify:
    def test_geometric_reference_certified_at_depth_one(self):
        sigma = geometric_sigma()
        r = expect(indicator_all_ones(), sigma, TOL).midpoint
        verdict = classify(indicator_all_ones(), sigma, all_ones_point(), r, 1)
        assert verdict.verdict == Z0_CERTIFIED

    def test_mix_cylinder_half_certified_depth_two(self):
        sigma = uniform_sigma()
        verdict = classify(mix_cylinder(), sigma, all_zeros_point(),
                           F(1, 2), 2)
        assert verdict.certified
        # four-point enumeration gives {0, 0.3, 0.7, 1}
        assert (verdict.hull.lo, verdict.hull.hi) == (0, 1)

    def test_far_mismatch_pins_hull_and_stays_undetermined(self):
        sigma = geometric_sigma()
        m = 3
        x = modify_point(all_ones_point(), {m + 5: 0})
        verdict = classify(indicator_all_ones(), sigma, x, F(1, 4), m)
        assert verdict.verdict == UNDETERMINED
        assert (verdict.hull.lo, verdict.hull.hi) == (0, 0)

    def test_never_certifies_a_negative(self):
        # r far outside the range: still only "undetermined"
        sigma = uniform_sigma()
        verdict = classify(mix_cylinder(), sigma, all_zeros_point(), F(7, 2), 2)
        assert verdict.verdict == UNDETERMINED


class TestConstructWeakZero:
    def test_mix_cylinder_alpha_two_sevenths(self):
        # f(z_1) = f(0,0,..) = 0, f(z_2) = f(1,0,..) = 0.7:
        # alpha*0 + (1-alpha)*0.7 = 0.5 forces alpha = 2/7
        sigma = uniform_sigma()
        x = all_zeros_point()
        y = modify_point(x, {1: 1, 2: 1})
        cert = construct_weak_zero(mix_cylinder(), sigma, x, y, F(1, 2))
        assert cert.coordinate == 1
        assert cert.alpha == F(2, 7)
        assert cert.achieved == F(1, 2)
        assert cert.tau.weight_of(0) == F(2, 7)
        assert cert.tau.weight_of(1) == F(5, 7)

    def test_constant_function_degenerate_alpha_one(self, sigma_uniform):
        f = Cylinder(1, {(0,): F(2), (1,): F(2)})
        x = all_zeros_point()
        cert = construct_weak_zero(f, sigma_uniform, x, x, 2)
        assert cert.coordinate == 1 and cert.alpha == 1
        assert cert.tau.is_dirac

    def test_single_coordinate_bernoulli_quarter(self):
        f = Cylinder(1, {(0,): F(0), (1,): F(1)})
        sigma = uniform_sigma(head_weights=(F(1, 4),))
        x = all_zeros_point()
        y = modify_point(x, {1: 1})
        cert = construct_weak_zero(f, sigma, x, y, F(1, 4))
        assert cert.coordinate == 1 and cert.alpha == F(3, 4)

    def test_not_straddling_raises(self):
        sigma = uniform_sigma()
        with pytest.raises(NotStraddlingError):
            construct_weak_zero(mix_cylinder(), sigma, all_zeros_point(),
                                all_zeros_point(), F(1, 2))

    def test_certificate_mixture_verifies_through_engine(self):
        # the hybrid measure the certificate describes must reproduce r
        sigma = uniform_sigma()
        x = all_zeros_point()
        y = modify_point(x, {1: 1, 2: 1})
        cert = construct_weak_zero(mix_cylinder(), sigma, x, y, F(1, 2))
        k = cert.coordinate
        head = tuple(
            HybridMeasure.dirac(cert.point).assignment_at(i)
            for i in range(1, k)
        )
        mixture = HybridMeasure(head[:k - 1] + (MeasureAssignment(cert.tau),),
                                k + 1, cert.point)
        res = expect(mix_cylinder(), mixture, TOL)
        assert res.interval.is_point and res.interval.lo == F(1, 2)

    def test_adjacency_of_walk_points(self):
        sigma = uniform_sigma()
        x = modify_point(all_zeros_point(), {1: 1, 3: 1})
        y = modify_point(all_zeros_point(), {2: 1, 4: 1})
        from prodex.model import agreement_index, splice_prefix
        n = agreement_index(x, y)
        for k in range(1, n + 1):
            zk, zk1 = splice_prefix(x, y, k), splice_prefix(x, y, k + 1)
            diffs = [i for i in range(1, n + 2)
                     if point_coordinate(zk, i) != point_coordinate(zk1, i)]
            assert diffs == [k] or (diffs == [] and
                                    point_coordinate(x, k) ==
                                    point_coordinate(y, k))


class TestWeakZeroFromSample:
    def test_mix_cylinder_every_seed_certifies(self):
        sigma = uniform_sigma()
        for seed in range(20):
            cert = weak_zero_from_sample(mix_cylinder(), sigma, TOL, 2,
                                         seed=seed)
            assert 0 <= cert.alpha <= 1
            assert cert.achieved == F(1, 2)

    def test_constant_function_first_sample(self, sigma_uniform):
        f = Cylinder(1, {(0,): F(3), (1,): F(3)})
        cert = weak_zero_from_sample(f, sigma_uniform, TOL, 1, seed=0)
        assert cert.alpha == 1

    def test_geometric_monte_carlo_high_success(self):
        """Certificates achieve the reference within 1e-9 on at least 99 of
        100 seeds (depth 30, horizon 60)."""
        sigma = geometric_sigma()
        f = indicator_all_ones()
        r = expect(f, sigma, TOL).midpoint
        lo, hi = geometric_indicator_envelope(60)
        successes = 0
        for seed in range(100):
            try:
                cert = weak_zero_from_sample(f, sigma, TOL, 30, seed=seed,
                                             retries=1, horizon=60)
            except StraddleNotFoundError:
                continue
            assert cert.achieved == r
            assert lo - F(1, 10**9) <= cert.achieved <= hi + F(1, 10**9)
            successes += 1
        assert successes >= 99

    def test_straddle_not_found_reports_depth_and_tries(self):
        # coordinate 5 is pinned off-target by the measure, so no depth-1
        # modification of any sample can lift the indicator above 0
        f = indicator_all_ones()
        sigma = uniform_sigma(head_weights=(F(1, 2),) * 4 + (0,))
        with pytest.raises(StraddleNotFoundError) as err:
            weak_zero_from_sample(f, sigma, TOL, 1, seed=5, retries=3,
                                  reference=F(1, 2))
        assert err.value.depth == 1
        assert err.value.samples_tried == 3


class TestCertificateProperties:
    @given(seed=st.integers(min_value=0, max_value=2**32))
    @settings(max_examples=40, deadline=None)
    def test_exactness_and_single_coordinate_support(self, seed):
        sigma = uniform_sigma()
        cert = weak_zero_from_sample(mix_cylinder(), sigma, TOL, 2, seed=seed)
        assert 0 <= cert.alpha <= 1
        assert cert.mixed_value(mix_cylinder()) == cert.achieved
        assert len(cert.tau.support()) <= 2
        # mixed outcomes differ from the certificate point only at k
        other = modify_point(cert.point, {cert.coordinate: cert.symbol_high})
        for i in range(1, 10):
            if i != cert.coordinate:
                assert point_coordinate(other, i) == \
                    point_coordinate(cert.point, i)

    def test_z0_certification_is_constructive(self):
        # whenever classify certifies, the constructor must succeed
        sigma = uniform_sigma()
        f = mix_cylinder()
        r = expect(f, sigma, TOL).midpoint
        for seed in range(30):
            x = LazyPoint(seed, sigma)
            verdict = classify(f, sigma, x, r, 2)
            if verdict.certified:
                cert = construct_weak_zero(
                    f, sigma, verdict.hull.witness_min,
                    verdict.hull.witness_max, r)
                assert cert.achieved == r

    def test_covering_union_contains_straddle(self):
        # exercised on every constructor run; spot-check the walk values
        sigma = uniform_sigma()
        f = discounted_unit()
        x = all_zeros_point()
        y = modify_point(x, {1: 1, 2: 1, 3: 1})
        from prodex.model import splice_prefix
        values = [eval_function(f, splice_prefix(x, y, k), 8).lo
                  for k in range(1, 5)]
        assert min(values) <= values[0] and values[-1] <= max(values)
        cert = construct_weak_zero(f, sigma, x, y, F(1, 2))
        assert cert.value_low <= F(1, 2) <= cert.value_high
