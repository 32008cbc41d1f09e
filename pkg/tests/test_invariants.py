"""Cross-module invariants as property tests."""
import random
from fractions import Fraction as F

from hypothesis import assume, given
from hypothesis import strategies as st

from cantorprod.constructions import t15_constants, t16_constants
from cantorprod.core import cover_endpoints, lower, normalize_union, refine, upper
from cantorprod.setops import certified_gaps, minkowski_sum, product
from cantorprod.thickness import (distortion_thickness_bounds, f_k, log_distortion,
                                  log_map_cover, split_at_max_gap, thickness)
from cantorprod.thresholds import ConditionId, holds

from conftest import random_system, unions

seeds = st.integers(0, 10**6)
ratios = st.fractions(F(1, 4), F(8), max_denominator=12).filter(lambda x: x > 0)


class TestRefinement:
    @given(seeds, st.integers(0, 3))
    def test_nested(self, seed, d):
        c = random_system(random.Random(seed), 0, 1)
        assert refine(c, d + 1).intervals.issubset(refine(c, d).intervals)

    @given(seeds, st.integers(1, 3))
    def test_endpoints_survive(self, seed, d):
        c = random_system(random.Random(seed), -1, 2)
        deep = refine(c, d + 2).intervals
        assert all(deep.contains_point(p) for p in cover_endpoints(refine(c, d)))

    @given(unions(), st.randoms(use_true_random=False))
    def test_normalize_idempotent_and_order_free(self, u, rnd):
        ivs = list(u.intervals)
        rnd.shuffle(ivs)
        assert normalize_union(ivs) == u
        assert normalize_union(u.intervals) == u


class TestThicknessInvariants:
    @given(unions(min_size=2))
    def test_split_pieces_at_least_as_thick(self, u):
        tau = thickness(u).value
        for piece in split_at_max_gap(u):
            assert thickness(piece).value >= tau

    @given(unions(min_size=2, max_size=6, positive=True))
    def test_log_distortion_bounds(self, u):
        prec = F(1, 2**60)
        tau = thickness(u).value
        c1, c2 = log_distortion(u, prec)
        lo, hi = distortion_thickness_bounds(tau, c1, c2)
        tl = thickness(log_map_cover(u, prec)).value
        assert lo <= lower(tl) and upper(tl) <= hi

    @given(st.integers(1, 6), st.fractions(F(1, 10), F(20), max_denominator=50),
           st.fractions(F(1, 50), F(5), max_denominator=50))
    def test_f_k_strictly_decreasing(self, k, x, dx):
        assume(x > 0 and dx > 0)
        a, b = f_k(k, x), f_k(k, x + dx)
        assert upper(b) < lower(a)


class TestSetopsInvariants:
    @given(seeds, seeds, st.integers(1, 2))
    def test_monotone_under_refinement(self, s1, s2, d):
        A = random_system(random.Random(s1), 1, 2)
        B = random_system(random.Random(s2), -1, 3)
        a0, a1 = refine(A, d).intervals, refine(A, d + 1).intervals
        b0, b1 = refine(B, d).intervals, refine(B, d + 1).intervals
        assert minkowski_sum(a1, b1).issubset(minkowski_sum(a0, b0))
        assert product(a1, b1).issubset(product(a0, b0))

    @given(unions(max_size=6), unions(max_size=6), ratios, st.fractions(-5, 5, max_denominator=8))
    def test_affine_compatibility(self, A, B, a, t):
        assert product(A.scaled(a), B) == product(A, B).scaled(a)
        assert minkowski_sum(A.scaled(F(1), t), B) == minkowski_sum(A, B).scaled(F(1), t)

    @given(seeds, seeds, st.integers(1, 2))
    def test_certified_gaps_persist(self, s1, s2, d):
        A = random_system(random.Random(s1), 1, 2)
        B = random_system(random.Random(s2), 1, 3)
        shallow = product(refine(A, d).intervals, refine(B, d).intervals)
        deep = product(refine(A, d + 2).intervals, refine(B, d + 2).intervals)
        for g1, g2 in certified_gaps(shallow):
            assert not any(g1 < a < g2 or g1 < b < g2 for a, b in deep)


pos = st.fractions(F(1, 4), F(6), max_denominator=16).filter(lambda x: x > 0)


class TestConstructionIdentities:
    @given(pos, pos)
    def test_countable_region_identities(self, M, N):
        if M < N:
            M, N = N, M
        assume(holds(ConditionId.COND_THM0, M, N))
        C = M * (1 + N) / (1 + M)
        assert 1 + 1 / M > 1 + N / (1 + C)
        assert (1 + 2 * M) / M == (1 + C + N) / C
        assert C >= N

    @given(pos, pos)
    def test_two_component_identities(self, M, N):
        assume(2 * (M + 1) * (N + 1) > (M * N - 1) ** 2)
        C1, C2 = t15_constants(M, N)
        assert 0 < C1 < M and 0 < C2 < N
        lhs = (1 + C1 + M) / (M - C1) * (1 + C2 + N) / (N - C2)
        assert lhs == 1 + (1 + M) / C1 == 1 + (1 + N) / C2
        assert 1 + 1 / C1 > 1 + N / (1 + C2)
        assert 1 + 1 / C2 > 1 + M / (1 + C1)

    @given(pos, pos)
    def test_cm_pair_identities(self, M, N):
        if M < N:
            M, N = N, M
        assume(holds(ConditionId.COND_INTERSECTION, M, N))
        c = t16_constants(M, N)
        M1 = c["M1"]
        assert 1 + (1 + M1) / c["C1"] == 1 + (1 + N) / c["C2"]
        assert c["C2"] >= N * N / (3 * N + 1)
        if c["branch"] == 1:
            assert 1 + 1 / c["C1"] > 1 + N / (1 + c["C2"])
