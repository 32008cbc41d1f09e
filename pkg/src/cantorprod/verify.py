"""Scenario harness: refine, combine, classify, certify.

A scenario fixes a pair of constructions, an operation and a depth range.
:func:`run_scenario` sweeps the depths, classifies the resulting unions and
compares the verdict with the expected one.  Gap certificates carry the
exact gap, the witnessing endpoint factorizations and the construction
text, so :func:`recheck_certificate` can confirm them from the payload
alone by a route that does not use the fast product.
"""

from __future__ import annotations

import csv
import io
import logging
import time
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .constructions import PaperPairSpec, S5_CASES, middle_stack, middle_alpha, paper_pair
from .core.arith import (DEFAULT_PRECISION, Enclosure, as_rational, format_rational, lower,
                         sign, upper)
from .core.construction import Construction, GeometricStack
from .core.refine import CoverApprox, Gap, positive_part, refine
from .core.serialize import dump_spec, load_spec
from .core.unions import IntervalUnion
from .setops import (StructureVerdict, SweepRow, Tag, _rational_union, classify_structure,
                     leaf_product_bound, minkowski_sum, product, sum_bound, sweep_csv)
from .thickness import (INFINITE, InsufficientDepth, ThicknessValue, classify_gaps, find_cover,
                        log_map_cover, log_thickness_bound, niceness_constants, thickness)
from .thresholds import ConditionId, require

log = logging.getLogger(__name__)

EXIT_MATCH = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_INDETERMINATE = 3
EXIT_FAILURE = 4


# ---------------------------------------------------------------------------
# gap certificates


@dataclass(frozen=True)
class GapCertificate:
    """A gap (g1, g2) of K*L (or K+L) with points of the set at g1 and g2.

    ``left_witness`` / ``right_witness`` are endpoint pairs (x, y) of the
    depth-``depth`` covers with x*y = g1 and x*y = g2 (x+y for sums).
    """

    gap: tuple
    left_point: object
    right_point: object
    left_witness: Optional[tuple] = None
    right_witness: Optional[tuple] = None
    depth: Optional[int] = None
    stack_blocks: Optional[int] = None
    operation: str = "product"
    spec_text: Optional[str] = None

    def to_text(self) -> str:
        f = format_rational
        lines = ["certificate=1", f"operation={self.operation}",
                 f"gap={f(self.gap[0])},{f(self.gap[1])}"]
        if self.depth is not None:
            lines.append(f"depth={self.depth}")
        if self.stack_blocks is not None:
            lines.append(f"stack_blocks={self.stack_blocks}")
        for key, w in (("left_witness", self.left_witness), ("right_witness", self.right_witness)):
            if w is not None:
                lines.append(f"{key}={f(w[0])},{f(w[1])}")
        if self.spec_text:
            lines.append("spec:")
            lines.extend(self.spec_text.rstrip("\n").splitlines())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GapCertificate":
        head, _, spec = text.partition("spec:\n")
        kv = {}
        for line in head.splitlines():
            line = line.strip()
            if line:
                k, _, v = line.partition("=")
                kv[k] = v
        if kv.get("certificate") != "1":
            raise ValueError("not a certificate (missing 'certificate=1')")

        def pair(v):
            a, b = v.split(",")
            return Fraction(a), Fraction(b)

        g = pair(kv["gap"])
        return cls(g, g[0], g[1],
                   pair(kv["left_witness"]) if "left_witness" in kv else None,
                   pair(kv["right_witness"]) if "right_witness" in kv else None,
                   int(kv["depth"]) if "depth" in kv else None,
                   int(kv["stack_blocks"]) if "stack_blocks" in kv else None,
                   kv.get("operation", "product"), spec or None)


def gap_certificate(product_cover: IntervalUnion, inner_points: Sequence) -> Optional[GapCertificate]:
    """Widest bounded gap of the cover with certified points on both sides."""
    U = _rational_union(product_cover)
    pts = sorted(inner_points, key=lower)
    keys = [lower(p) for p in pts]
    best = None
    for g1, g2 in U.gaps():
        i = bisect_right(keys, g1)
        j = bisect_left(keys, g2)
        if i == 0 or j >= len(pts):
            continue
        left, right = pts[i - 1], pts[j]
        if upper(left) > g1 or not U.contains_point(left) or not U.contains_point(right):
            continue
        if best is None or g2 - g1 > best.gap[1] - best.gap[0]:
            best = GapCertificate((g1, g2), left, right)
    return best


def _endpoint_set(cv: CoverApprox) -> set:
    return {p for p in cv.intervals.endpoints() if not isinstance(p, Enclosure)}


def _witness(target: Fraction, xs: set, ys: set, operation: str) -> Optional[tuple]:
    for x in sorted(xs):
        if operation == "product":
            if x == 0:
                if target == 0 and ys:
                    return (x, min(ys))
                continue
            y = target / x
        else:
            y = target - x
        if y in ys:
            return (x, y)
    return None


def certify_gaps(K: Construction, L: Construction, depth: int, stack_blocks: int,
                 operation: str = "product") -> list:
    """Certificates (with witnesses where exact) for every gap of the combined cover."""
    ck, cl = refine(K, depth, stack_blocks), refine(L, depth, stack_blocks)
    op = product if operation == "product" else minkowski_sum
    U = op(ck.intervals, cl.intervals)
    xs, ys = _endpoint_set(ck), _endpoint_set(cl)
    text = dump_spec({"K": K, "L": L})
    out = []
    for g1, g2 in U.gaps():
        lw = _witness(g1, xs, ys, operation)
        rw = _witness(g2, xs, ys, operation)
        out.append(GapCertificate((g1, g2), g1, g2, lw, rw, depth, stack_blocks, operation, text))
    return out


def _forbidden_product(a1, a2, g1, g2) -> list:
    """Open y-intervals with x*y in (g1, g2) for some x in [a1, a2]; None = infinite."""
    out = []

    def positive_side(p1, p2, h1, h2):
        # x in [p1, p2], 0 <= p1, p2 > 0
        if p1 > 0:
            lo = min(h1 / p1, h1 / p2)
            hi = max(h2 / p1, h2 / p2)
        else:
            lo = h1 / p2 if h1 >= 0 else None
            hi = None if h2 > 0 else h2 / p2
        return lo, hi

    if a2 > 0:
        out.append(positive_side(max(a1, Fraction(0)), a2, g1, g2))
    if a1 < 0:
        # x*y = (-x)(-y): reflect x and y
        lo, hi = positive_side(max(-a2, Fraction(0)), -a1, g1, g2)
        out.append((None if hi is None else -hi, None if lo is None else -lo))
    if a1 <= 0 <= a2 and g1 < 0 < g2:
        out.append((None, None))
    return out


class _Probe:
    """Open-interval intersection queries against a sorted union."""

    def __init__(self, cover: IntervalUnion):
        self.ivs = cover.intervals
        self.his = [b for _, b in self.ivs]

    def meets(self, lo, hi) -> bool:
        if lo is not None and hi is not None and lo >= hi:
            return False
        # first interval whose right end exceeds lo
        i = 0 if lo is None else bisect_right(self.his, lo)
        if i >= len(self.ivs):
            return False
        return hi is None or self.ivs[i][0] < hi


def recheck_certificate(cert: GapCertificate, K: Optional[Construction] = None,
                        L: Optional[Construction] = None, depth: Optional[int] = None,
                        stack_blocks: Optional[int] = None) -> tuple:
    """Re-verify a certificate; returns (ok, reason).

    The gap is checked interval by interval: for each interval a of the K
    cover, the L cover must avoid every y with a*y meeting the gap.  This
    uses neither the fast product nor its merge logic.
    """
    if K is None or L is None:
        if not cert.spec_text:
            return False, "certificate carries no construction text"
        outs = load_spec(cert.spec_text)
        K, L = outs["K"], outs["L"]
    depth = cert.depth if depth is None else depth
    stack_blocks = cert.stack_blocks if stack_blocks is None else stack_blocks
    if depth is None or stack_blocks is None:
        return False, "certificate has no depth"
    ck = _rational_union(refine(K, depth, stack_blocks).intervals)
    cl = _rational_union(refine(L, depth, stack_blocks).intervals)
    g1, g2 = cert.gap
    if not g1 < g2:
        return False, "empty gap"
    probe = _Probe(cl)
    for a1, a2 in ck:
        if cert.operation == "product":
            regions = _forbidden_product(a1, a2, g1, g2)
        else:
            regions = [(g1 - a2, g2 - a1)]
        for lo, hi in regions:
            if probe.meets(lo, hi):
                return False, f"cover interval [{a1}, {a2}] reaches into the gap"
    xs = set(ck.endpoints()) if ck.is_exact else set()
    ys = set(cl.endpoints()) if cl.is_exact else set()
    for w, target in ((cert.left_witness, g1), (cert.right_witness, g2)):
        if w is None:
            continue
        x, y = w
        val = x * y if cert.operation == "product" else x + y
        if val != target:
            return False, f"witness {x}, {y} does not give {target}"
        if x not in xs or y not in ys:
            return False, f"witness {x}, {y} is not a pair of cover endpoints"
    return True, "ok"


# ---------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class Expected:
    tag: Tag
    components: Optional[int] = None
    ratio: Optional[Fraction] = None
    needs_gap: bool = False
    theorem: str = ""

    def label(self) -> str:
        if self.tag is Tag.COMPONENTS:
            s = f"Components({self.components})"
        elif self.tag is Tag.ZERO_PLUS_GEOMETRIC_TAIL:
            s = f"ZeroPlusGeometricTail({format_rational(self.ratio)})"
        else:
            s = self.tag.value
        return s + (" + GapCertified" if self.needs_gap else "")


@dataclass(frozen=True)
class Scenario:
    name: str
    K: Construction
    L: Construction
    operation: str
    depths: tuple
    expected: Expected
    stack_blocks: int = 12
    precision: Fraction = DEFAULT_PRECISION
    ratio_hint: Optional[Fraction] = None
    params: tuple = ()


@dataclass
class Report:
    scenario: Scenario
    rows: list
    verdict: Optional[StructureVerdict]
    status: str
    outcome: str
    certificate: Optional[GapCertificate] = None
    evidence: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def exit_code(self) -> int:
        return {"match": EXIT_MATCH, "mismatch": EXIT_MISMATCH,
                "indeterminate": EXIT_INDETERMINATE}.get(self.status, EXIT_FAILURE)

    def sweep_csv(self) -> str:
        if self.scenario.operation == "intersection":
            return _intersection_csv(self.rows)
        return sweep_csv(self.rows)

    def body(self) -> str:
        s = self.scenario
        lines = [f"scenario: {s.name}", f"theorem: {s.expected.theorem}",
                 f"operation: {s.operation}",
                 "params: " + ", ".join(f"{k}={format_rational(as_rational(v)) if not isinstance(v, str) else v}"
                                        for k, v in s.params),
                 f"depths: {s.depths[0]}..{s.depths[-1]}", f"stack_blocks: {s.stack_blocks}",
                 f"expected: {s.expected.label()}", "", self.sweep_csv().rstrip("\n"), "",
                 f"verdict: {self.outcome}"]
        if self.verdict is not None:
            lines.append(f"certified gaps: {len(self.verdict.certified_gaps)} (rigorous); "
                         f"tag {self.verdict.tag.value}: {'rigorous' if self.verdict.rigorous else 'evidence'}")
            bounds = [b for b in self.verdict.evidence.get("evidence_bounds", []) if b is not None]
            if bounds:
                lines.append("inner evidence gap bound: " + format_rational(bounds[-1]))
        for k in sorted(self.evidence):
            lines.append(f"{k}: {self.evidence[k]}")
        if self.certificate is not None:
            lines.append("certificate:")
            c = self.certificate
            head = c.to_text().split("spec:")[0].rstrip("\n")
            lines.extend("  " + x for x in head.splitlines())
        lines.append(f"status: {self.status}")
        return "\n".join(lines) + "\n"

    def text(self) -> str:
        return self.body() + f"wall time: {self.wall_time:.3f} s\n"


def _p(params: dict, key: str, default):
    """Read a rational parameter, recording the default so reports echo it."""
    if params.get(key) is None:
        params[key] = default
    v = params[key]
    return v if v is None else as_rational(v)


def _k(params: dict, default=None):
    v = params.get("k", default)
    return None if v is None else int(as_rational(v))


def _sym_stack(M):
    """0-set: middle stack mirrored onto the negative side."""
    K, _ = middle_stack(M)
    return GeometricStack(K.block, K.ratio, None, True, Fraction(1))


def _sc_thm2_positive(p):
    M, N = _p(p, "M", 2), _p(p, "N", 2)
    require(ConditionId.COND465, M, N)
    (K, _), (L, _) = middle_stack(M), middle_stack(N)
    return K, L, "product", Expected(Tag.SINGLE_INTERVAL, 1, theorem="0+ x 0+ interval"), None


def _sc_thm3_positive(p):
    M, N = _p(p, "M", 2), _p(p, "N", 2)
    require(ConditionId.COND3654, M, N)
    K, _ = middle_stack(M)
    return K, _sym_stack(N), "product", Expected(Tag.SINGLE_INTERVAL, 1,
                                                 theorem="0+ x 0 interval"), None


def _sc_thm4_positive(p):
    M, N = _p(p, "M", 3), _p(p, "N", 3)
    require(ConditionId.COND46578, M, N)
    return _sym_stack(M), _sym_stack(N), "product", Expected(
        Tag.SINGLE_INTERVAL, 1, theorem="0 x 0 interval"), None


def _pair_scenario(theorem, expected_fn, defaults=(Fraction(3, 2), Fraction(3, 2))):
    def build(p):
        M, N = _p(p, "M", defaults[0]), _p(p, "N", defaults[1])
        pair = paper_pair(PaperPairSpec(theorem, M, N, k=_k(p), case=p.get("case"),
                                        alpha=_p(p, "alpha", Fraction(1, 1000))))
        return pair.K, pair.L, "product", expected_fn(pair, p), pair.ratio_hint
    return build


def _exp_from_pair(theorem_label):
    def fn(pair, p):
        e = pair.expected
        if e.startswith("components("):
            k = int(e[len("components("):-1])
            return Expected(Tag.COMPONENTS, k, needs_gap=True, theorem=theorem_label)
        if e == "zero-plus-geometric-tail":
            return Expected(Tag.ZERO_PLUS_GEOMETRIC_TAIL, ratio=pair.ratio_hint, needs_gap=True,
                            theorem=theorem_label)
        raise ValueError(f"unexpected verdict {e}")
    return fn


def _sc_sum_baseline(p):
    alpha = _p(p, "alpha", Fraction(1, 3))
    K = middle_alpha(alpha)
    return K, K, "sum", Expected(Tag.SINGLE_INTERVAL, 1, theorem="sum of thick sets"), None


def _sc_williams(p):
    M, N = _p(p, "M", 2), _p(p, "N", 2)
    pair = paper_pair(PaperPairSpec("Williams_intersection", M, N))
    return pair.K, pair.L, "intersection", Expected(
        Tag.SINGLE_INTERVAL, theorem="one-point intersection"), pair.ratio_hint


SCENARIOS: dict = {
    "thm2-positive": (_sc_thm2_positive, "two 0+ sets above the golden threshold: an interval", 3, 8),
    "thm2-countable": (_pair_scenario("T13_countable", _exp_from_pair("0+ x 0+ countable")),
                       "0+ x 0+ counterexample: {0} and countably many intervals", 3, 7),
    "thm2-kComponents": (_pair_scenario("T13_kComponents", _exp_from_pair("0+ x 0+ k intervals")),
                         "0+ x 0+ counterexample with k components", 3, 7),
    "thm3-positive": (_sc_thm3_positive, "0+ x 0 above the threshold: an interval", 3, 7),
    "thm3-mixed": (_pair_scenario("T14_mixed", _exp_from_pair("0+ x 0 counterexample"),
                                  (Fraction(1), Fraction(1))),
                   "0+ x 0 counterexample (countable, or k components with k=..)", 3, 7),
    "thm4-positive": (_sc_thm4_positive, "two 0 sets above the silver threshold: an interval", 3, 7),
    "thm4-twoComponents": (_pair_scenario("T15_twoComponents", _exp_from_pair("0 x 0 two intervals"),
                                          (Fraction(2), Fraction(2))),
                           "0 x 0 counterexample: two intervals", 3, 8),
    "thm5-countable": (_pair_scenario("T16_countable", _exp_from_pair("0 x 0 countable"),
                                      (Fraction(2), Fraction(2))),
                       "0 x 0 counterexample built from (C,M)-sets", 3, 7),
    "thm2-sum-baseline": (_sc_sum_baseline, "middle-1/3 + middle-1/3 = [0, 2]", 1, 6),
    "williams-intersection": (_sc_williams, "K and -L meet in exactly one point", 2, 7),
}
for _case in S5_CASES:
    _defaults = (Fraction(1), Fraction(1)) if _case.startswith("5.1") else (Fraction(2), Fraction(2))
    SCENARIOS["s5-" + _case] = (
        _pair_scenario("S5_case", _exp_from_pair(f"other cases {_case}"), _defaults),
        S5_CASES[_case], 3, 6)


def build_scenario(name: str, params: Optional[dict] = None, max_depth: Optional[int] = None,
                   min_depth: Optional[int] = None, stack_blocks: int = 12) -> Scenario:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; choose from {', '.join(sorted(SCENARIOS))}")
    builder, _, lo, hi = SCENARIOS[name]
    params = dict(params or {})
    if name.startswith("s5-"):
        params["case"] = name[3:]
        params.setdefault("k", 3)
    if name == "thm2-kComponents":
        params.setdefault("k", 3)
    if name == "thm3-mixed" and "k" in params and params["k"] is None:
        del params["k"]
    K, L, op, exp, hint = builder(params)
    hi = hi if max_depth is None else max_depth
    lo = lo if min_depth is None else min_depth
    if lo > hi:
        lo = hi
    shown = tuple(sorted((k, v) for k, v in params.items() if v is not None))
    return Scenario(name, K, L, op, tuple(range(lo, hi + 1)), exp, stack_blocks,
                    DEFAULT_PRECISION, hint, shown)


def _matches(v: StructureVerdict, e: Expected) -> bool:
    if v.tag is not e.tag:
        return False
    if e.tag is Tag.COMPONENTS and v.components != e.components:
        return False
    if e.tag is Tag.ZERO_PLUS_GEOMETRIC_TAIL and v.ratio != e.ratio:
        return False
    if e.needs_gap and not v.certified_gaps:
        return False
    return True


def run_scenario(s: Scenario) -> Report:
    t0 = time.perf_counter()
    try:
        if s.operation == "intersection":
            rep = _run_intersection(s)
        else:
            rep = _run_sweep(s)
    except (ArithmeticError, InsufficientDepth, RecursionError) as exc:
        rep = Report(s, [], None, "failure", f"computational failure: {exc}")
    rep.wall_time = time.perf_counter() - t0
    return rep


def _run_sweep(s: Scenario) -> Report:
    rows = []
    exact = True
    for d in s.depths:
        ck = refine(s.K, d, s.stack_blocks).intervals
        cl = refine(s.L, d, s.stack_blocks).intervals
        exact = exact and ck.is_exact and cl.is_exact
        if s.operation == "product":
            U, bound = product(ck, cl), leaf_product_bound(ck, cl)
        else:
            U, bound = minkowski_sum(ck, cl), sum_bound(ck, cl)
        rows.append(SweepRow(d, U, bound))
    tol = Fraction(0) if exact else s.precision
    v = classify_structure(rows, s.ratio_hint, tolerance=tol)
    cert = None
    if v.certified_gaps:
        certs = certify_gaps(s.K, s.L, s.depths[-1], s.stack_blocks, s.operation)
        target = v.gap
        cert = next((c for c in certs if c.gap == target), certs[0] if certs else None)
    if v.tag is Tag.INDETERMINATE:
        status = "indeterminate"
    else:
        status = "match" if _matches(v, s.expected) else "mismatch"
    return Report(s, rows, v, status, v.label(), cert)


# ---------------------------------------------------------------------------
# intersections


@dataclass(frozen=True)
class IntersectionRow:
    depth: int
    components: int
    diameter: object
    interleaved: bool
    gap_lemma: Optional[bool]


def _in_domain(h: tuple, U: IntervalUnion) -> bool:
    """Is the interval h inside a gap or an unbounded ray of U?"""
    a, b = h
    if upper(b) < lower(U.left) or lower(a) > upper(U.right):
        return True
    for g1, g2 in U.gaps():
        if upper(g1) < lower(a) and upper(b) < lower(g2):
            return True
    return False


def interleaved(A: IntervalUnion, B: IntervalUnion) -> bool:
    return not _in_domain(A.hull(), B) and not _in_domain(B.hull(), A)


def _gap_lemma_holds(ck: CoverApprox, cl: CoverApprox) -> Optional[bool]:
    tk, tl = thickness(ck).value, thickness(cl).value
    if tk is INFINITE or tl is INFINITE:
        return True
    s = sign(tk * tl - 1)
    return None if s is None else s >= 0


@dataclass
class IntersectionReport:
    rows: list
    nonempty: bool
    diameter_ratios: list
    constant_ratio: bool
    counts_nondecreasing: bool


def intersection_check(K: Construction, L: Construction, depths: Sequence,
                       stack_blocks: Optional[int] = None) -> IntersectionReport:
    """Per-depth intersection of covers; ``stack_blocks`` defaults to depth + 1."""
    rows = []
    for d in depths:
        sb = d + 1 if stack_blocks is None else stack_blocks
        ck, cl = refine(K, d, sb), refine(L, d, sb)
        I = ck.intervals.intersect(cl.intervals)
        diam = Fraction(0) if I.is_empty else I.diameter()
        rows.append(IntersectionRow(d, len(I), diam, interleaved(ck.intervals, cl.intervals),
                                    _gap_lemma_holds(ck, cl)))
    ratios = []
    for a, b in zip(rows, rows[1:]):
        ratios.append(None if a.diameter == 0 else b.diameter / a.diameter)
    nonempty = all(r.components > 0 for r in rows)
    const = bool(ratios) and None not in ratios and len(set(ratios)) == 1
    counts = [r.components for r in rows]
    return IntersectionReport(rows, nonempty, ratios, const,
                              all(x <= y for x, y in zip(counts, counts[1:])))


def _intersection_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["depth", "components", "diameter", "interleaved", "gap_lemma"])
    for r in rows:
        w.writerow([r.depth, r.components, format_rational(r.diameter), int(r.interleaved),
                    "" if r.gap_lemma is None else int(r.gap_lemma)])
    return buf.getvalue()


def _run_intersection(s: Scenario) -> Report:
    rep = intersection_check(s.K, s.L, s.depths)
    ok = rep.nonempty and rep.constant_ratio and all(r.components == 1 for r in rep.rows)
    ratio = rep.diameter_ratios[0] if rep.constant_ratio else None
    if ok:
        outcome = f"SinglePoint(diameter ratio {format_rational(ratio)})"
    else:
        outcome = "no single-point evidence"
    ev = {"diameter ratios": ", ".join("-" if r is None else format_rational(r)
                                       for r in rep.diameter_ratios)}
    return Report(s, rep.rows, None, "match" if ok else "mismatch", outcome, None, ev)


# ---------------------------------------------------------------------------
# cover containment


@dataclass(frozen=True)
class ContainmentResult:
    gap_K: Gap
    gap_L: Gap
    x: tuple
    y: tuple
    upper_ok: bool
    lower_ok: bool

    @property
    def passed(self) -> bool:
        return self.upper_ok and self.lower_ok


def cover_containment_check(K: Construction, L: Construction, depth: int,
                            stack_blocks: int = 12, tau_K=None, tau_L=None) -> list:
    """Check X + Y contains U1 + U2 for every pair of bad gaps, in log coordinates.

    With U1 = log W1 and U2 = log W2 bad gaps of log K_+ and log L_+, and X, Y
    their covers in log K_-, log L_-, the two endpoint inequalities become
    X^R Y^R >= W1^R W2^R and W1^L W2^L >= X^L Y^L (X^L = 0 for an extended
    cover), decided exactly.
    """
    ck, cl = refine(K, depth, stack_blocks), refine(L, depth, stack_blocks)
    tk = thickness(ck).value if tau_K is None else tau_K
    tl = thickness(cl).value if tau_L is None else tau_L
    if isinstance(tk, Enclosure) or isinstance(tl, Enclosure):
        raise ArithmeticError("thickness is not exact; pass tau_K and tau_L")
    require(ConditionId.COND46578, tk, tl)
    nc = niceness_constants(tk, tl)
    c_kl, c_lk = nc.C_xy, nc.C_yx
    bad_k = [g for g, c in classify_gaps(ck, c_kl) if c.is_bad]
    bad_l = [g for g, c in classify_gaps(cl, c_lk) if c.is_bad]
    covers_k = [find_cover(ck, c_kl, g, tk) for g in bad_k]
    covers_l = [find_cover(cl, c_lk, g, tl) for g in bad_l]
    out = []
    for X in covers_k:
        for Y in covers_l:
            w1, w2 = X.gap, Y.gap
            up = X.x_right * Y.x_right >= w1.right * w2.right
            xl = 0 if X.x_left is None else X.x_left
            yl = 0 if Y.x_left is None else Y.x_left
            low = w1.left * w2.left >= xl * yl
            out.append(ContainmentResult(w1, w2, (X.x_left, X.x_right), (Y.x_left, Y.x_right),
                                         bool(up), bool(low)))
    return out


# ---------------------------------------------------------------------------
# truncations of extended log images


@dataclass(frozen=True)
class TruncationPoint:
    cut: Fraction
    log_cut: Enclosure
    thickness: ThicknessValue
    target: object

    @property
    def margin(self):
        return self.thickness.value - self.target if self.thickness.value is not INFINITE else None


def stable_truncation(c: Construction, epsilon, search_depth: int = 4, C=None,
                      stack_blocks: int = 6, precision=Fraction(1, 2**40),
                      tau=None) -> list:
    """Cut points k of log(K_+) whose truncation log(K_+) cap [k, top] is thick.

    Candidates are the right endpoints of the gaps of the depth-``search_depth``
    cover (the tail interval at 0 is dropped).  The target is the bound
    log(1 + tau/(1+C)) / log(1 + 1/C) when ``C`` is given, else the
    thickness of the whole log cover.  A point is kept when the lower end of
    its truncation thickness is at least ``target - epsilon``.
    """
    epsilon = as_rational(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    cv = positive_part(refine(c, search_depth, stack_blocks))
    ivs = [(a, b) for a, b in cv.intervals if lower(a) > 0]
    if len(ivs) < 2:
        log.warning("stable_truncation: positive part has no gaps at this depth")
        return []
    pos = CoverApprox(cv.depth, IntervalUnion(tuple(ivs)), c, stack_blocks)
    lc = log_map_cover(pos, precision)
    if C is None:
        tv = thickness(lc).value
        target = tv if not isinstance(tv, Enclosure) else tv.lo
    else:
        t = thickness(refine(c, search_depth, stack_blocks)).value if tau is None else tau
        target = log_thickness_bound(lower(t), C, precision).hi
    out = []
    log_ivs = lc.intervals.intervals
    for i in range(1, len(ivs)):
        piece = CoverApprox(lc.depth, IntervalUnion(log_ivs[i:]), c, stack_blocks)
        tv = thickness(piece)
        lo = INFINITE if tv.value is INFINITE else lower(tv.value)
        if lo is INFINITE or lo >= upper(target) - epsilon:
            out.append(TruncationPoint(ivs[i][0], log_ivs[i][0], tv, target))
    if not out:
        log.warning("stable_truncation: no cut point found within depth %d", search_depth)
    return out
