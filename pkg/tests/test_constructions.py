from fractions import Fraction as F

import pytest

from cantorprod.constructions import (S5_CASES, CMCantorParams, PaperPairSpec, cm_cantor,
                                      cm_thickness, geometric_stack, middle_alpha,
                                      middle_for_thickness, middle_stack, paper_pair, reflect,
                                      t15_constants, t16_constants, thick_stack, thick_two_sided,
                                      two_block_pair)
from cantorprod.core import Enclosure, lower, refine, upper
from cantorprod.thickness import thickness


def _tau(c, depth=3, blocks=6):
    return thickness(refine(c, depth, blocks)).value


def _same(a, b):
    """Exact equality, or overlapping enclosures."""
    if isinstance(a, Enclosure) or isinstance(b, Enclosure):
        return lower(a) <= upper(b) and lower(b) <= upper(a)
    return a == b


class TestBasic:
    def test_middle_alpha_tau(self):
        assert middle_alpha(F(1, 3)).tau == 1
        assert middle_for_thickness(F(2)) == F(1, 5)

    @pytest.mark.parametrize("bad", [F(0), F(1), F(3, 2)])
    def test_middle_alpha_range(self, bad):
        with pytest.raises(ValueError):
            middle_alpha(bad)

    @pytest.mark.parametrize("M", [F(1, 2), F(1), F(2), F(5)])
    def test_middle_stack_thickness(self, M):
        K, rho = middle_stack(M)
        assert rho == M / (1 + 2 * M)
        assert _tau(K, 4, 5) == M

    def test_geometric_stack_finite(self):
        s = geometric_stack(middle_alpha(F(1, 3), (F(1, 2), F(1))), F(1, 3), 2, False)
        assert refine(s, 0).intervals.intervals == ((F(1, 6), F(1, 3)), (F(1, 2), 1))

    def test_reflect(self):
        assert refine(reflect(middle_alpha(F(1, 3))), 1).intervals.intervals == (
            (-1, F(-2, 3)), (F(-1, 3), 0))

    def test_thick_pieces(self):
        s = thick_stack(F(2))
        assert refine(s, 1, 4).intervals.right == 2
        assert lower(_tau(s, 2, 6)) > 10
        t = thick_two_sided(F(1), F(3))
        assert refine(t, 0, 3).intervals.hull() == (-3, 1)
        u = thick_two_sided(F(1), F(1), negative_reaches_zero=False, inner=F(1, 100))
        neg = [iv for iv in refine(u, 0, 3).intervals if iv[1] < 0]
        assert neg and neg[-1][1] <= F(-1, 200)


class TestCM:
    def test_branch_point(self):
        # C = M^2/(3M+1) makes both closed forms agree; at M=1 that is C=1/4 -> 1
        assert cm_thickness(F(1, 4), F(1)) == Enclosure.point(1)
        for M in (F(1), F(2), F(7, 3)):
            C = M * M / (3 * M + 1)
            root = C * (1 + C + M)
            assert (M - C) ** 2 == root

    def test_lower_branch(self):
        e = cm_thickness(F(1, 10), F(1), F(1, 2**50))
        # 1/10 + sqrt(21/100)
        assert e.width <= F(1, 2**50)
        assert (e.lo - F(1, 10)) ** 2 <= F(21, 100) <= (e.hi - F(1, 10)) ** 2

    @pytest.mark.parametrize("C,M", [(F(1, 10), F(1)), (F(1), F(2)), (F(1, 2), F(3))])
    def test_cover_thickness(self, C, M):
        tv = _tau(cm_cantor(CMCantorParams(C, M)), 3, 6)
        assert _same(tv, cm_thickness(C, M, F(1, 2**60)))

    def test_block_too_thin(self):
        with pytest.raises(ValueError, match="too small"):
            CMCantorParams(F(1), F(2), middle_alpha(F(1, 3), (F(2, 4), F(1))))

    def test_block_hull_checked(self):
        with pytest.raises(ValueError, match="hull"):
            CMCantorParams(F(1), F(2), middle_alpha(F(1, 1000)))


class TestPairs:
    CASES = [
        PaperPairSpec("T13_countable", F(3, 2), F(3, 2)),
        PaperPairSpec("T13_countable", F(1), F(3, 2)),
        PaperPairSpec("T13_kComponents", F(3, 2), F(3, 2), k=3),
        PaperPairSpec("T14_mixed", F(1), F(1)),
        PaperPairSpec("T14_mixed", F(1), F(1), k=3),
        PaperPairSpec("T15_twoComponents", F(2), F(2)),
        PaperPairSpec("T16_countable", F(2), F(2)),
        PaperPairSpec("T16_countable", F(1), F(3, 2)),
        PaperPairSpec("Williams_intersection", F(2), F(2)),
    ] + [PaperPairSpec("S5_case", F(1) if c.startswith("5.1") else F(2),
                       F(1) if c.startswith("5.1") else F(2), k=3, case=c) for c in S5_CASES]

    @pytest.mark.parametrize("spec", CASES, ids=lambda s: f"{s.theorem}-{s.case or s.k or ''}-{s.M}-{s.N}")
    def test_cover_thickness_matches(self, spec):
        pair = paper_pair(spec)
        assert _same(_tau(pair.K, 3, 6), pair.tau_K)
        assert _same(_tau(pair.L, 3, 6), pair.tau_L)

    def test_t15_constants(self):
        C1, C2 = t15_constants(F(2), F(2))
        assert C1 == C2 == F(4, 7)
        # (M - C1)(N - C2) = C1 (1 + C2 + N)
        for M, N in ((F(2), F(2)), (F(3), F(5, 2)), (F(7, 3), F(1, 2))):
            C1, C2 = t15_constants(M, N)
            assert (M - C1) * (N - C2) == C1 * (1 + C2 + N)
            assert (M - C1) * (N - C2) == C2 * (1 + C1 + M)

    def test_t15_gap_geometry(self):
        K, L, c = two_block_pair(F(2), F(2))
        ck = refine(K, 0, 1).intervals
        assert ck.left == c["C1"] - 2 and ck.right == 1 + c["C1"] + 2

    def test_t16_branches(self):
        assert t16_constants(F(2), F(2))["branch"] == 1
        b2 = t16_constants(F(4), F(2))
        assert b2["branch"] == 2 and b2["M1"] == 5

    @pytest.mark.parametrize("spec,msg", [
        (PaperPairSpec("T13_countable", F(2), F(2)), "fails"),
        (PaperPairSpec("T15_twoComponents", F(3), F(3)), "fails"),
        (PaperPairSpec("T16_countable", F(4), F(4)), "fails"),
        (PaperPairSpec("S5_case", F(2), F(2), k=3, case="9.9"), "case"),
        (PaperPairSpec("T99", F(2), F(2)), "theorem"),
    ])
    def test_hypotheses_checked(self, spec, msg):
        with pytest.raises(ValueError, match=msg):
            paper_pair(spec)

    def test_swap_keeps_roles(self):
        pair = paper_pair(PaperPairSpec("T13_countable", F(1), F(3, 2)))
        assert (pair.tau_K, pair.tau_L) == (1, F(3, 2))
