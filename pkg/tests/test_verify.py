import random
from fractions import Fraction as F

import pytest

from cantorprod.constructions import (PaperPairSpec, middle_alpha, middle_stack, paper_pair,
                                      two_block_pair)
from cantorprod.core import FiniteUnion, GeometricStack, lower, normalize_union, refine
from cantorprod.setops import Tag, minkowski_sum
from cantorprod.thickness import log_thickness_bound
from cantorprod.verify import (EXIT_FAILURE, EXIT_INDETERMINATE, EXIT_MATCH, EXIT_MISMATCH,
                               SCENARIOS, GapCertificate, Report, build_scenario,
                               certify_gaps, cover_containment_check, gap_certificate,
                               intersection_check, interleaved, recheck_certificate,
                               run_scenario, stable_truncation)

from conftest import SEED, min_cover_thickness, random_system


class TestGapCertificate:
    def test_single_interval(self):
        assert gap_certificate(normalize_union([(0, 2)]), [F(0), F(1)]) is None

    def test_missing_side(self):
        u = normalize_union([(0, 1), (2, 3)])
        assert gap_certificate(u, [F(0), F(1)]) is None

    def test_widest(self):
        u = normalize_union([(0, 1), (2, 3), (6, 7)])
        c = gap_certificate(u, [F(0), F(1), F(2), F(3), F(6)])
        assert c.gap == (3, 6)

    def test_t15_depth_six(self):
        pair = paper_pair(PaperPairSpec("T15_twoComponents", F(2), F(2)))
        certs = certify_gaps(pair.K, pair.L, 6, 12)
        assert [c.gap for c in certs] == [(F(100, 49), F(121, 49))]
        c = certs[0]
        assert c.left_witness[0] * c.left_witness[1] == F(100, 49)
        assert c.right_witness[0] * c.right_witness[1] == F(121, 49)


class TestRecheck:
    @pytest.fixture(scope="class")
    @staticmethod
    def cert():
        pair = paper_pair(PaperPairSpec("T15_twoComponents", F(2), F(2)))
        return certify_gaps(pair.K, pair.L, 5, 12)[0]

    def test_round_trip(self, cert):
        back = GapCertificate.from_text(cert.to_text())
        assert back == cert
        assert recheck_certificate(back) == (True, "ok")

    def test_deeper_cover_keeps_it(self, cert):
        for d in (6, 8):
            assert recheck_certificate(cert, depth=d)[0]

    def test_widened_gap_fails(self, cert):
        g1, g2 = cert.gap
        bad = GapCertificate((g1 - F(1, 100), g2), cert.left_point, cert.right_point, None, None,
                             cert.depth, cert.stack_blocks, cert.operation, cert.spec_text)
        ok, reason = recheck_certificate(bad)
        assert not ok and "reaches into the gap" in reason

    def test_false_witness_fails(self, cert):
        bad = GapCertificate(cert.gap, cert.left_point, cert.right_point, (F(1), cert.gap[0]),
                             None, cert.depth, cert.stack_blocks, cert.operation, cert.spec_text)
        assert not recheck_certificate(bad)[0]

    def test_sum_certificate(self):
        K = middle_alpha(F(3, 5))
        cert = certify_gaps(K, K, 2, 1, "sum")[0]
        assert recheck_certificate(GapCertificate.from_text(cert.to_text()))[0]

    def test_no_payload(self):
        assert not recheck_certificate(GapCertificate((F(0), F(1)), F(0), F(1)))[0]


class TestScenarios:
    def test_every_scenario_builds(self):
        for name in SCENARIOS:
            s = build_scenario(name, max_depth=3, min_depth=3)
            assert s.expected.theorem
            assert s.depths == (3,)

    @pytest.mark.parametrize("name,label", [
        ("thm2-positive", "SingleInterval"),
        ("thm2-sum-baseline", "SingleInterval"),
        ("thm2-countable", "ZeroPlusGeometricTail(3/8)"),
        ("thm3-mixed", "ZeroPlusGeometricTail(1/3)"),
        ("thm4-twoComponents", "Components(2)"),
        ("thm5-countable", "ZeroPlusGeometricTail(4/25)"),
        ("s5-5.3", "Components(3)"),
        ("s5-5.4", "ZeroPlusGeometricTail(2/5)"),
    ])
    def test_match(self, name, label):
        rep = run_scenario(build_scenario(name))
        assert rep.status == "match", rep.text()
        assert rep.exit_code == EXIT_MATCH
        assert rep.verdict.label() == label

    def test_sum_baseline_every_depth(self):
        rep = run_scenario(build_scenario("thm2-sum-baseline"))
        assert all(r.union.intervals == ((0, 2),) for r in rep.rows)

    def test_k_components(self):
        for k in (2, 4):
            rep = run_scenario(build_scenario("thm2-kComponents", {"k": k}, max_depth=5))
            assert rep.verdict.label() == f"Components({k})"

    def test_williams(self):
        rep = run_scenario(build_scenario("williams-intersection", max_depth=5))
        assert rep.status == "match"
        assert rep.outcome == "SinglePoint(diameter ratio 4/25)"

    def test_mismatch_exit(self):
        s = build_scenario("thm2-positive", max_depth=5)
        s2 = build_scenario("thm4-twoComponents", max_depth=5)
        swapped = type(s)(s.name, s.K, s.L, s.operation, s.depths, s2.expected)
        rep = run_scenario(swapped)
        assert rep.status == "mismatch" and rep.exit_code == EXIT_MISMATCH

    def test_indeterminate_exit(self):
        s = build_scenario("thm2-countable", min_depth=3, max_depth=3)
        s = type(s)(s.name, s.K, s.L, s.operation, s.depths, s.expected, s.stack_blocks,
                    s.precision, None)
        rep = run_scenario(s)
        assert rep.verdict.tag is Tag.GAP_CERTIFIED or rep.status == "indeterminate"
        r = Report(s, [], None, "indeterminate", "Indeterminate")
        assert r.exit_code == EXIT_INDETERMINATE
        assert Report(s, [], None, "failure", "x").exit_code == EXIT_FAILURE

    def test_precondition(self):
        with pytest.raises(ValueError, match="fails"):
            build_scenario("thm4-twoComponents", {"M": F(3), "N": F(3)})

    def test_unknown(self):
        with pytest.raises(KeyError):
            build_scenario("nope")

    def test_deterministic_body(self):
        a = run_scenario(build_scenario("thm4-twoComponents", max_depth=5))
        b = run_scenario(build_scenario("thm4-twoComponents", max_depth=5))
        assert a.body() == b.body()
        assert "wall time" in a.text() and "wall time" not in a.body()
        assert a.certificate is not None and "certificate:" in a.body()


class TestIntersection:
    def test_disjoint_hulls(self):
        rep = intersection_check(middle_alpha(F(1, 3)), middle_alpha(F(1, 3), (F(2), F(3))), [0])
        assert rep.rows[0].components == 0
        assert not rep.rows[0].interleaved
        assert not rep.nonempty

    def test_interleaving(self):
        A = normalize_union([(0, 1), (3, 4)])
        assert not interleaved(A, normalize_union([(F(3, 2), F(5, 2))]))
        assert interleaved(A, normalize_union([(F(1, 2), F(7, 2))]))

    def test_thick_pair_counts_nondecreasing(self):
        # tau = 5/2 on both sides, shifted so that the sets interleave
        K = middle_alpha(F(1, 6))
        L = middle_alpha(F(1, 6), (F(1, 7), F(8, 7)))
        rep = intersection_check(K, L, range(0, 6))
        assert rep.nonempty
        assert rep.counts_nondecreasing
        assert all(r.gap_lemma for r in rep.rows[1:])

    def test_williams_ratio(self):
        pair = paper_pair(PaperPairSpec("Williams_intersection", F(2), F(2)))
        rep = intersection_check(pair.K, pair.L, range(2, 6))
        assert rep.constant_ratio and rep.diameter_ratios[0] == F(4, 25)


class TestContainment:
    def test_non_vacuous(self):
        K = FiniteUnion((middle_alpha(F(1, 1000), (F(-8), F(1, 2))),
                         middle_alpha(F(1, 1000), (F(3), F(12)))))
        res = cover_containment_check(K, K, 2)
        assert len(res) == 1 and res[0].passed
        assert res[0].x == (None, 8)

    def test_vacuous_for_nice_covers(self):
        K, L, _ = two_block_pair(F(3), F(5, 2))
        assert cover_containment_check(K, L, 3, tau_K=F(3), tau_L=F(5, 2)) == []

    def test_precondition(self):
        pair = paper_pair(PaperPairSpec("T15_twoComponents", F(2), F(2)))
        with pytest.raises(ValueError, match=r"\(MN-1\)\^2"):
            cover_containment_check(pair.K, pair.L, 3)


class TestTruncation:
    def test_middle_third_stack(self):
        K, _ = middle_stack(F(1))
        target = log_thickness_bound(F(1), F(1), F(1, 2**40))
        pts = stable_truncation(K, F(1, 100), 3, C=F(1))
        assert pts
        for p in pts:
            assert p.target == target.hi
            if not p.thickness.is_infinite:
                assert lower(p.thickness.value) >= p.target - F(1, 100)

    def test_periodic_chain_constant(self):
        K, _ = middle_stack(F(2))
        pts = stable_truncation(K, F(1, 100), 2, stack_blocks=5)
        assert len(pts) >= 3
        # the truncations at block boundaries all see the same pattern
        by_block = [p for p in pts if p.cut in {F(3, 5) * F(2, 5) ** n for n in range(1, 5)}]
        assert len(by_block) >= 2
        values = [p.thickness.value for p in by_block]
        # equal up to outward rounding: the enclosures share a point
        assert max(v.lo for v in values) <= min(v.hi for v in values)

    def test_large_epsilon_keeps_all(self):
        K, _ = middle_stack(F(1))
        pts = stable_truncation(K, F(100), 2, C=F(1), stack_blocks=4)
        cv = refine(K, 2, 4)
        assert len(pts) == len([1 for a, _ in cv.intervals if a > 0]) - 1

    def test_rejects_bad_epsilon(self):
        with pytest.raises(ValueError):
            stable_truncation(middle_stack(F(1))[0], F(0))

    def test_empty_with_diagnostic(self, caplog):
        K = GeometricStack(middle_alpha(F(1, 3), (F(1, 2), F(1))), F(1, 3), 1, False)
        assert stable_truncation(K, F(1, 100), 0) == []
        assert "no gaps" in caplog.text


class TestInvariants:
    def test_gap_lemma_small_suite(self):
        rng = random.Random(SEED + 1)
        found = 0
        while found < 20:
            K = random_system(rng, 0, 1)
            a = F(rng.randint(-40, 20), 20)
            L = random_system(rng, a, a + F(rng.randint(5, 40), 20))
            if min_cover_thickness(K, 4) * min_cover_thickness(L, 4) < 1:
                continue
            if not interleaved(refine(K, 4).intervals, refine(L, 4).intervals):
                continue
            found += 1
            assert intersection_check(K, L, range(5)).nonempty

    def test_sum_components_bounded(self):
        rng = random.Random(SEED + 2)
        done = 0
        while done < 30:
            K = random_system(rng, 0, 1)
            L = random_system(rng, 0, rng.randint(1, 3))
            if min_cover_thickness(K, 5) * min_cover_thickness(L, 5) < 1:
                continue
            done += 1
            first = len(minkowski_sum(refine(K, 1).intervals, refine(L, 1).intervals))
            for d in range(2, 6):
                assert len(minkowski_sum(refine(K, d).intervals, refine(L, d).intervals)) <= first
