from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from cantorprod.constructions import middle_alpha, middle_stack
from cantorprod.core import Enclosure, IntervalUnion, hausdorff_distance, normalize_union, refine
from cantorprod.setops import (SWEEP_HEADER, SweepRow, Tag, certified_gaps, classify_structure,
                               largest_internal_gap, leaf_product_bound, minkowski_sum,
                               naive_minkowski_sum, naive_product, product, product_via_logs,
                               route_slack, scale_periodic, sweep_csv)

from conftest import unions


def U(*ivs):
    return normalize_union(ivs)


class TestSum:
    def test_middle_third_sum_is_interval(self):
        c = refine(middle_alpha(F(1, 3)), 5).intervals
        assert minkowski_sum(c, c).intervals == ((0, 2),)

    def test_small(self):
        assert minkowski_sum(U((0, 1), (3, 4)), U((0, F(1, 2)))) == U((0, F(3, 2)), (3, F(9, 2)))

    @given(unions(max_size=10), unions(max_size=10))
    def test_fast_equals_naive(self, a, b):
        assert minkowski_sum(a, b) == naive_minkowski_sum(a, b)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            minkowski_sum(IntervalUnion(()), U((0, 1)))


class TestProduct:
    def test_signs(self):
        assert product(U((-2, -1)), U((3, 4))) == U((-8, -3))
        assert product(U((-2, 1)), U((-1, 3))) == U((-6, 3))
        assert product(U((0, 0)), U((3, 4))) == U((0, 0))

    def test_two_components(self):
        assert product(U((1, 2), (5, 6)), U((1, F(11, 10)))) == U((1, F(11, 5)), (5, F(33, 5)))

    @given(unions(max_size=10, lo=-8, hi=8), unions(max_size=10, lo=-8, hi=8))
    def test_fast_equals_naive(self, a, b):
        assert product(a, b) == naive_product(a, b)

    @given(unions(max_size=8, lo=-8, hi=8), unions(max_size=8, lo=-8, hi=8))
    def test_commutative(self, a, b):
        assert product(a, b) == product(b, a)

    def test_stack_products_match_naive(self):
        K, _ = middle_stack(F(2))
        c = refine(K, 3, 5).intervals
        assert product(c, c) == naive_product(c, c)

    def test_enclosure_endpoints_rounded_outward(self):
        a = normalize_union([(Enclosure(F(1), F(11, 10)), F(2))])
        p = product(a, U((1, 2)))
        assert p.is_exact
        assert p == U((1, 4))

    @given(unions(max_size=8, positive=True, hi=30), unions(max_size=8, positive=True, hi=30))
    @settings(max_examples=40)
    def test_log_route_within_slack(self, a, b):
        prec = F(1, 2**40)
        d = hausdorff_distance(product(a, b), product_via_logs(a, b, prec))
        assert d <= route_slack(a, b, prec)

    def test_leaf_bound(self):
        assert leaf_product_bound(U((1, 2)), U((-3, -1), (4, 5))) == 5 * 1 + 2 * 2


class TestCertifiedGaps:
    def test_all_endpoints_certified(self):
        assert certified_gaps(U((0, 1), (2, 3))) == [(1, 2)]

    def test_single_interval(self):
        assert certified_gaps(U((0, 3))) == []

    def test_missing_side(self):
        u = U((0, 1), (2, 3))
        assert certified_gaps(u, [F(1, 2)]) == []
        assert certified_gaps(u, [F(1, 2), F(5, 2)]) == [(1, 2)]

    def test_points_outside_union_ignored(self):
        assert certified_gaps(U((0, 1), (2, 3)), [F(1, 2), F(4)]) == []


class TestScalePeriodic:
    def test_geometric_tail(self):
        r = F(1, 4)
        ivs = [(r ** k * F(1, 2), r ** k) for k in range(6)] + [(0, r ** 6)]
        ev = scale_periodic(U(*ivs), r, periods=2)
        assert ev is not None and ev["top"] == 1

    def test_wrong_ratio(self):
        r = F(1, 4)
        ivs = [(r ** k * F(1, 2), r ** k) for k in range(6)] + [(0, r ** 6)]
        assert scale_periodic(U(*ivs), F(1, 3)) is None

    def test_needs_two_components_per_window(self):
        assert scale_periodic(U((0, 1)), F(1, 2)) is None


class TestClassify:
    def rows(self, unions_):
        return [SweepRow(d, u) for d, u in enumerate(unions_)]

    def test_single_interval(self):
        v = classify_structure(self.rows([U((0, 1))] * 3))
        assert v.tag is Tag.SINGLE_INTERVAL and v.label() == "SingleInterval"
        assert not v.rigorous

    def test_components(self):
        v = classify_structure(self.rows([U((0, 1), (2, 3))] * 4))
        assert v.label() == "Components(2)"
        assert v.certified_gaps == ((1, 2),)

    def test_gap_certified_when_not_persistent(self):
        v = classify_structure(self.rows([U((0, 3)), U((0, 1), (2, 3)), U((0, 1), (F(5, 2), 3))]))
        assert v.tag is Tag.GAP_CERTIFIED
        assert v.rigorous and v.gap == (1, F(5, 2))

    def test_indeterminate(self):
        v = classify_structure(self.rows([U((0, 3)), U((0, 4))]))
        assert v.tag is Tag.INDETERMINATE

    def test_zero_plus(self):
        r = F(1, 4)
        u = U(*([(r ** k * F(1, 2), r ** k) for k in range(6)] + [(0, r ** 6)]))
        v = classify_structure(self.rows([u] * 3), ratio_hint=r)
        assert v.label() == "ZeroPlusGeometricTail(1/4)"

    def test_sweep_csv(self):
        text = sweep_csv(self.rows([U((0, 1), (2, 5))]))
        assert text.splitlines() == [",".join(SWEEP_HEADER), "0,2,0/1,5/1,1/1"]
        assert largest_internal_gap(U((0, 1))) == 0
