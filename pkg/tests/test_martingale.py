"""Reverse-martingale sequence and the strong approximation finder."""

from fractions import Fraction

import pytest

from prodex.engine import expect
from prodex.errors import ToleranceConfigError
from prodex.functions import Cylinder, eval_function
from prodex.martingale import (
    FOUND,
    INCONCLUSIVE,
    NOT_FOUND,
    find_strong_approx,
    g_n,
    trace,
)
from prodex.model import modify_point

from conftest import (
    all_ones_point,
    discounted_unit,
    geometric_indicator_envelope,
    geometric_sigma,
    indicator_all_ones,
    mix_cylinder,
    partial_product,
    uniform_sigma,
)

F = Fraction
TOL = F(1, 10**9)


class TestGn:
    def test_constant_function_every_n(self, sigma_uniform):
        f = Cylinder(1, {(0,): F(3), (1,): F(3)})
        x = all_ones_point()
        for n in (1, 2, 5):
            res = g_n(f, sigma_uniform, x, n, TOL)
            assert res.interval.is_point and res.interval.lo == 3

    def test_geometric_indicator_partial_product_at_six(self):
        res = g_n(indicator_all_ones(), geometric_sigma(), all_ones_point(),
                  6, TOL)
        assert res.interval.is_point
        assert res.interval.lo == partial_product(5)

    def test_discounted_split_head_integral_plus_tail(self):
        # g_3 = 0.5*(w_1 + w_2) + (tail beyond 2) = 0.375 + 0.25
        res = g_n(discounted_unit(), uniform_sigma(), all_ones_point(), 3, TOL)
        assert res.interval.is_point
        assert res.interval.lo == F(5, 8)

    def test_g1_equals_point_evaluation(self):
        for f in (mix_cylinder(), discounted_unit(), indicator_all_ones()):
            sigma = uniform_sigma()
            x = modify_point(all_ones_point(), {1: 0, 4: 0})
            res = g_n(f, sigma, x, 1, TOL)
            vb = eval_function(f, x, horizon=8)
            assert res.interval.is_point and vb.is_point
            assert res.interval.lo == vb.lo


class TestTrace:
    def test_constant_trace_flat(self, sigma_uniform):
        f = Cylinder(1, {(0,): F(1, 2), (1,): F(1, 2)})
        tr = trace(f, sigma_uniform, all_ones_point(), 5, TOL)
        assert all(e.interval.is_point and e.interval.lo == F(1, 2)
                   for e in tr.entries)
        assert tr.reference.interval.contains(F(1, 2))

    def test_geometric_trace_matches_partial_products_exactly(self):
        tr = trace(indicator_all_ones(), geometric_sigma(), all_ones_point(),
                   8, TOL)
        assert tr.entries[0].interval.lo == 1  # g_1 = f(all-ones)
        for e in tr.entries[1:]:
            assert e.interval.is_point
            assert e.interval.lo == partial_product(e.n - 1)

    def test_geometric_trace_strictly_decreases_toward_reference(self):
        tr = trace(indicator_all_ones(), geometric_sigma(), all_ones_point(),
                   8, TOL)
        mids = [e.interval.lo for e in tr.entries[1:]]
        assert all(a > b for a, b in zip(mids, mids[1:]))
        assert mids[-1] > tr.reference.interval.hi

    def test_discounted_trace_closed_form(self):
        # g_n = 1/2 + 2**-n for the all-ones point under the uniform measure
        tr = trace(discounted_unit(), uniform_sigma(), all_ones_point(), 6, TOL)
        for e in tr.entries:
            assert e.interval.is_point
            assert e.interval.lo == F(1, 2) + F(1, 2**e.n)


class TestFindStrongApprox:
    def test_example_geometric_found_at_six(self):
        res = find_strong_approx(indicator_all_ones(), geometric_sigma(),
                                 all_ones_point(), F(1, 100), 60, TOL)
        assert res.outcome == FOUND and res.n == 6

    def test_certification_margins_around_six(self):
        # independent check of the Found(6) verdict: exact distances
        lo, hi = geometric_indicator_envelope(60)
        assert partial_product(5) - hi <= F(1, 100)   # n = 6 is inside
        assert partial_product(4) - hi > F(1, 100)    # n = 5 is outside

    def test_epsilon_at_range_width_found_immediately(self):
        res = find_strong_approx(mix_cylinder(), uniform_sigma(),
                                 all_ones_point(), 1, 4, F(1, 100))
        assert res.outcome == FOUND and res.n == 1

    def test_discounted_found_at_four(self):
        res = find_strong_approx(discounted_unit(), uniform_sigma(),
                                 all_ones_point(), F(1, 10), 10, TOL)
        assert res.outcome == FOUND and res.n == 4

    def test_zero_epsilon_constant_function(self, sigma_uniform):
        f = Cylinder(1, {(0,): F(2), (1,): F(2)})
        res = find_strong_approx(f, sigma_uniform, all_ones_point(), 0, 3, TOL)
        assert res.outcome == FOUND and res.n == 1

    def test_not_found_reported(self):
        # indicator under geometric measure at the all-ones point: g_n > E
        # strictly, and epsilon below the n_max gap keeps every n violating
        gap = partial_product(3) - geometric_indicator_envelope(60)[1]
        eps = gap / 2
        res = find_strong_approx(indicator_all_ones(), geometric_sigma(),
                                 all_ones_point(), eps, 4, eps / 8)
        assert res.outcome == NOT_FOUND

    def test_tolerance_headroom_enforced(self):
        with pytest.raises(ToleranceConfigError):
            find_strong_approx(discounted_unit(), uniform_sigma(),
                               all_ones_point(), F(1, 10), 5, F(1, 10))

    def test_inconclusive_when_interval_straddles_threshold(self):
        # a wide reference enclosure (as left by an exhausted budget) makes
        # the comparison undecidable for every n whose g_n it overlaps
        from prodex.engine import ExpectationResult
        from prodex.numeric import Interval
        f = indicator_all_ones()
        sigma = geometric_sigma()
        wide = ExpectationResult(Interval(F(1, 4), F(1, 2)), 0,
                                 "budget_exhausted")
        res = find_strong_approx(f, sigma, all_ones_point(), F(1, 100), 3,
                                 TOL, reference=wide)
        assert res.outcome == INCONCLUSIVE
        assert 2 in res.undecided and 3 in res.undecided

    def test_minimality_found_means_no_earlier_undecided(self):
        res = find_strong_approx(indicator_all_ones(), geometric_sigma(),
                                 all_ones_point(), F(1, 100), 60, TOL)
        assert res.outcome == FOUND
        assert res.undecided == ()


class TestLazyPointResiduals:
    def test_gn_on_lazy_point_reports_disagreement_bound(self):
        # find a seed whose realization keeps the first 40 coordinates on
        # target: the verdict then rests on the tail and must carry eta
        from prodex.model import LazyPoint
        sigma = geometric_sigma()
        f = indicator_all_ones()
        x = None
        for seed in range(200):
            cand = LazyPoint(seed, sigma)
            if all(cand.coordinate(i) == 1 for i in range(1, 41)):
                x = cand
                break
        assert x is not None
        res = g_n(f, sigma, x, 3, TOL, horizon=40)
        assert res.interval.is_point
        assert res.interval.lo == partial_product(2)
        assert res.eta == F(1, 2**40)

    def test_described_point_verdicts_are_hard(self):
        res = g_n(indicator_all_ones(), geometric_sigma(), all_ones_point(),
                  3, TOL)
        assert res.eta == 0


class TestMartingaleIdentities:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_reverse_martingale_step(self, n):
        # g_{n+1}(x) = sum_t sigma_n(t) g_n(x with coordinate n set to t)
        f = Cylinder.from_callable(
            [(0, 1)] * 3,
            lambda a, b, c: F(1, 2) * a + F(1, 3) * b + F(1, 6) * c)
        sigma = uniform_sigma(head_weights=(F(1, 4), F(3, 5), F(1, 2)))
        x = all_ones_point()
        m = sigma.coordinate_measure(n)
        mixed = sum(
            (m.weight_of(t)
             * g_n(f, sigma, modify_point(x, {n: t}), n, TOL).interval.midpoint
             for t in (0, 1)), F(0))
        step = g_n(f, sigma, x, n + 1, TOL).interval.midpoint
        assert abs(step - mixed) <= 4 * TOL

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_tower_property(self, n):
        # E[x -> g_n(x)] = E[f]: g_n of a depth-d cylinder is itself a
        # cylinder in coordinates n..d; build its table by evaluation
        import itertools
        f = Cylinder.from_callable(
            [(0, 1)] * 4,
            lambda a, b, c, d: F(2, 5) * a + F(1, 5) * b + F(1, 5) * c
            + F(1, 5) * d)
        sigma = uniform_sigma(head_weights=(F(1, 3), F(2, 3), F(1, 2), F(4, 5)))
        entries = []
        for combo in itertools.product((0, 1), repeat=4):
            from prodex.model import ConstantSymbol, DescribedPoint
            pt = DescribedPoint(combo, ConstantSymbol(0))
            entries.append((combo, g_n(f, sigma, pt, n, TOL).interval.midpoint))
        h = Cylinder.from_entries(4, entries)
        lhs = expect(h, sigma, TOL).interval.midpoint
        rhs = expect(f, sigma, TOL).interval.midpoint
        assert abs(lhs - rhs) <= 4 * TOL


class TestGeometricStrictness:
    def test_gn_strictly_above_reference_for_fifty_indices(self):
        """g_n - E > 0 for all n <= 50 at the all-ones point: no index ever
        reproduces the expectation exactly, witnessing the empty strong-0 set.
        Exact rational comparison through partial products."""
        upper = geometric_indicator_envelope(120)[1]
        for n in range(1, 51):
            gn = g_n(indicator_all_ones(), geometric_sigma(),
                     all_ones_point(), n, TOL)
            assert gn.interval.is_point
            assert gn.interval.lo - upper > 0

    def test_gap_shrinks_to_zero(self):
        # the same point is a strong epsilon-approximation for every
        # positive epsilon: the gap at n is below 2**-(n-2)
        lo = geometric_indicator_envelope(120)[0]
        for n in (10, 20, 40):
            gap = partial_product(n - 1) - lo
            assert gap < F(1, 2**(n - 2))
