"""Sums, products, log/exp images of interval unions and structure verdicts.

The fast sum and product walk two max-gap trees together.  A pair of
subtrees whose hull combination is already covered is dropped, and a pair
that satisfies the gap lemma contributes its whole hull at once.  For
products the lemma is applied in log coordinates, where gap and diameter
comparisons stay exact (they compare ratios) and only the thickness product
is evaluated in floating point with a safety margin.  The ``naive_*``
versions enumerate all interval pairs and serve as oracles.
"""

from __future__ import annotations

import csv
import io
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core.arith import (DEFAULT_PRECISION, as_rational, exp_enclosure,
                         format_rational, log_enclosure, lower, upper)
from .core.unions import IntervalUnion, normalize_union

# relative margin on the float thickness product in log coordinates
_LOG_MARGIN = 1e-9


def _rational_union(A) -> IntervalUnion:
    """Round enclosure endpoints outward so the fast paths see Fractions only."""
    if not isinstance(A, IntervalUnion):
        A = normalize_union(A)
    if A.is_exact:
        return A
    return normalize_union((Fraction(lower(a)), Fraction(upper(b))) for a, b in A)


class _Node:
    __slots__ = ("lo", "hi", "left", "right", "gap", "tau")

    def __init__(self, lo, hi):
        self.lo, self.hi = lo, hi
        self.left = self.right = None
        self.gap = None   # measure of the split gap (the largest gap inside)
        self.tau = None   # None means infinite (a single interval)


def _build_tree(ivs: Sequence, gap_measure, width_measure, exact_tau: bool) -> _Node:
    """Max-gap (Cartesian) tree; thickness filled in bottom-up.

    The split gap of a node is its largest gap, so the bridges of that gap
    are the two child hulls and ``tau(node) = min(tau(l), tau(r),
    min(|l|, |r|) / |gap|)``.
    """
    leaves = [_Node(a, b) for a, b in ivs]
    if len(leaves) == 1:
        return leaves[0]
    gaps = [gap_measure(ivs[i][1], ivs[i + 1][0]) for i in range(len(ivs) - 1)]
    # Cartesian tree over gaps (max at root) via a monotone stack
    parent_of = [None] * len(gaps)
    lchild = [None] * len(gaps)
    rchild = [None] * len(gaps)
    stack = []
    for i, g in enumerate(gaps):
        last = None
        while stack and gaps[stack[-1]] < g:
            last = stack.pop()
        if last is not None:
            lchild[i] = last
            parent_of[last] = i
        if stack:
            rchild[stack[-1]] = i
            parent_of[i] = stack[-1]
        stack.append(i)
    root = stack[0]
    nodes = [None] * len(gaps)
    # post-order without recursion
    order, todo = [], [root]
    while todo:
        i = todo.pop()
        order.append(i)
        for c in (lchild[i], rchild[i]):
            if c is not None:
                todo.append(c)
    for i in reversed(order):
        left = nodes[lchild[i]] if lchild[i] is not None else leaves[i]
        right = nodes[rchild[i]] if rchild[i] is not None else leaves[i + 1]
        n = _Node(left.lo, right.hi)
        n.left, n.right, n.gap = left, right, gaps[i]
        wl, wr = width_measure(left.lo, left.hi), width_measure(right.lo, right.hi)
        g = _value(gaps[i]) if not exact_tau else gaps[i]
        if not exact_tau:
            wl, wr = _value(wl), _value(wr)
        own = min(wl, wr) / g if g else None
        cands = [t for t in (left.tau, right.tau, own) if t is not None]
        n.tau = min(cands) if cands else None
        nodes[i] = n
    return nodes[root]


def _value(r):
    """Float log of a ratio r >= 1 (keeps relative precision near 1)."""
    if isinstance(r, float):
        return r
    if r < 2:
        return math.log1p(float(r - 1))
    return math.log(r.numerator) - math.log(r.denominator)


class _Accumulator:
    """Sorted disjoint closed intervals with merge-on-insert."""

    def __init__(self):
        self.los: list = []
        self.his: list = []

    def covers(self, lo, hi) -> bool:
        i = bisect_right(self.los, lo) - 1
        return i >= 0 and self.his[i] >= hi

    def add(self, lo, hi) -> None:
        i = bisect_right(self.los, lo) - 1
        if i >= 0 and self.his[i] >= lo:
            start = i
            lo = self.los[i]
        else:
            start = i + 1
        j = start
        while j < len(self.los) and self.los[j] <= hi:
            j += 1
        if j > start:
            hi = max(hi, self.his[j - 1])
        self.los[start:j] = [lo]
        self.his[start:j] = [hi]

    def union(self) -> IntervalUnion:
        return IntervalUnion(tuple(zip(self.los, self.his)))


def _combine(P: _Node, Q: _Node, hull, lemma, acc: _Accumulator) -> None:
    todo = [(P, Q)]
    while todo:
        p, q = todo.pop()
        lo, hi = hull(p, q)
        if acc.covers(lo, hi):
            continue
        if (p.left is None and q.left is None) or lemma(p, q):
            acc.add(lo, hi)
            continue
        # split the side with the larger gap; leaves cannot be split
        if q.left is None or (p.left is not None and p.gap >= q.gap):
            todo.append((p.left, q))
            todo.append((p.right, q))
        else:
            todo.append((p, q.left))
            todo.append((p, q.right))


def _sum_lemma(p: _Node, q: _Node) -> bool:
    if p.left is not None and p.gap > q.hi - q.lo:
        return False
    if q.left is not None and q.gap > p.hi - p.lo:
        return False
    if p.tau is None or q.tau is None:
        return True
    return p.tau * q.tau >= 1


def _check_nonempty(A, B) -> None:
    if A.is_empty or B.is_empty:
        raise ValueError("set operations need nonempty unions")


def minkowski_sum(A: IntervalUnion, B: IntervalUnion) -> IntervalUnion:
    """{x + y : x in A, y in B}."""
    A, B = _rational_union(A), _rational_union(B)
    _check_nonempty(A, B)
    diff = lambda a, b: b - a  # noqa: E731
    tp = _build_tree(A.intervals, diff, diff, exact_tau=True)
    tq = _build_tree(B.intervals, diff, diff, exact_tau=True)
    acc = _Accumulator()
    _combine(tp, tq, lambda p, q: (p.lo + q.lo, p.hi + q.hi), _sum_lemma, acc)
    return acc.union()


def naive_minkowski_sum(A: IntervalUnion, B: IntervalUnion) -> IntervalUnion:
    _check_nonempty(A, B)
    return normalize_union((a + c, b + d) for a, b in A for c, d in B)


def _interval_product(a, b, c, d) -> tuple:
    ps = (a * c, a * d, b * c, b * d)
    return min(ps), max(ps)


def naive_product(A: IntervalUnion, B: IntervalUnion) -> IntervalUnion:
    _check_nonempty(A, B)
    return normalize_union(_interval_product(a, b, c, d) for a, b in A for c, d in B)


def _prod_lemma(p: _Node, q: _Node) -> bool:
    if p.left is not None and p.gap > q.hi / q.lo:
        return False
    if q.left is not None and q.gap > p.hi / p.lo:
        return False
    if p.tau is None or q.tau is None:
        return True
    return p.tau * q.tau >= 1 + _LOG_MARGIN


def _positive_product(P: tuple, Q: tuple, out: list) -> None:
    """Append P * Q for strictly positive interval lists."""
    if not P or not Q:
        return
    ratio = lambda a, b: b / a  # noqa: E731
    tp = _build_tree(P, ratio, ratio, exact_tau=False)
    tq = _build_tree(Q, ratio, ratio, exact_tau=False)
    acc = _Accumulator()
    _combine(tp, tq, lambda p, q: (p.lo * q.lo, p.hi * q.hi), _prod_lemma, acc)
    out.extend(zip(acc.los, acc.his))


def _nonneg_product(P: tuple, Q: tuple, out: list) -> None:
    """Append P * Q for interval lists inside [0, inf)."""
    if not P or not Q:
        return
    zp = P[0] if P[0][0] == 0 else None
    zq = Q[0] if Q[0][0] == 0 else None
    P1 = P[1:] if zp else P
    Q1 = Q[1:] if zq else Q
    if zp is not None:
        out.append((Fraction(0), zp[1] * Q[-1][1]))
    if zq is not None:
        out.append((Fraction(0), zq[1] * P[-1][1]))
    _positive_product(P1, Q1, out)


def _halves(A: IntervalUnion) -> tuple:
    """(A cap [0, inf), -(A cap (-inf, 0])) as ascending nonnegative lists."""
    pos, neg = [], []
    for a, b in A:
        if b >= 0:
            pos.append((max(a, Fraction(0)), b))
        if a <= 0:
            neg.append((-min(b, Fraction(0)), -a))
    neg.reverse()
    return tuple(pos), tuple(neg)


def product(A: IntervalUnion, B: IntervalUnion) -> IntervalUnion:
    """{x * y : x in A, y in B}, any signs."""
    A, B = _rational_union(A), _rational_union(B)
    _check_nonempty(A, B)
    ap, an = _halves(A)
    bp, bn = _halves(B)
    out: list = []
    _nonneg_product(ap, bp, out)
    _nonneg_product(an, bn, out)
    neg: list = []
    _nonneg_product(ap, bn, neg)
    _nonneg_product(an, bp, neg)
    out.extend((-b, -a) for a, b in neg)
    return normalize_union(out)


def log_map(A: IntervalUnion, precision=DEFAULT_PRECISION) -> IntervalUnion:
    """Image under log with outward-rounded enclosure endpoints."""
    if A.is_empty:
        return A
    if lower(A.left) <= 0:
        raise ValueError("log_map needs a strictly positive union")
    return normalize_union((log_enclosure(a, precision), log_enclosure(b, precision))
                           for a, b in A)


def exp_map(A: IntervalUnion, precision=DEFAULT_PRECISION) -> IntervalUnion:
    if A.is_empty:
        return A
    return normalize_union((exp_enclosure(a, precision), exp_enclosure(b, precision))
                           for a, b in A)


def product_via_logs(A: IntervalUnion, B: IntervalUnion,
                     precision=DEFAULT_PRECISION) -> IntervalUnion:
    """exp(log A + log B) for strictly positive unions (second route)."""
    s = minkowski_sum(log_map(A, precision), log_map(B, precision))
    return _rational_union(exp_map(s, precision))


def route_slack(A: IntervalUnion, B: IntervalUnion, precision=DEFAULT_PRECISION) -> Fraction:
    """Bound on the Hausdorff error of :func:`product_via_logs`.

    Each log endpoint is off by at most ``precision``, so a sum endpoint by
    ``2 precision``; exp turns that into a relative error below
    ``e^(2p) - 1 <= 3p`` (p small) plus its own ``precision``.
    """
    p = as_rational(precision)
    top = max(abs(upper(A.right)), abs(lower(A.left))) * max(abs(upper(B.right)), abs(lower(B.left)))
    return 3 * p * (top + 1) + p


def leaf_product_bound(A: IntervalUnion, B: IntervalUnion) -> Fraction:
    """Upper bound on the length of any pairwise interval product.

    When every cover endpoint is a point of the set, the products of
    endpoints are points of the product set and the product cover is the
    union of pairwise products; so this bounds the spacing of certified
    points inside every component.
    """
    A, B = _rational_union(A), _rational_union(B)
    _check_nonempty(A, B)
    wa = max(b - a for a, b in A)
    wb = max(d - c for c, d in B)
    ma = max(abs(A.left), abs(A.right))
    mb = max(abs(B.left), abs(B.right))
    return ma * wb + mb * wa


def sum_bound(A: IntervalUnion, B: IntervalUnion) -> Fraction:
    A, B = _rational_union(A), _rational_union(B)
    _check_nonempty(A, B)
    return max(b - a for a, b in A) + max(d - c for c, d in B)


# ---------------------------------------------------------------------------
# structure classification


class Tag(Enum):
    SINGLE_INTERVAL = "SingleInterval"
    COMPONENTS = "Components"
    ZERO_PLUS_GEOMETRIC_TAIL = "ZeroPlusGeometricTail"
    GAP_CERTIFIED = "GapCertified"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class SweepRow:
    depth: int
    union: IntervalUnion
    evidence_bound: Optional[Fraction] = None
    inner_points: Optional[tuple] = None


@dataclass(frozen=True)
class StructureVerdict:
    """Classification of a depth sweep.

    ``certified_gaps`` are rigorous (gaps of an outer cover flanked by points
    of the set); ``tag`` values SingleInterval, Components and
    ZeroPlusGeometricTail are evidence only.
    """

    tag: Tag
    depths: tuple
    components: Optional[int] = None
    ratio: Optional[Fraction] = None
    gap: Optional[tuple] = None
    certified_gaps: tuple = ()
    evidence: dict = field(default_factory=dict, compare=False)

    @property
    def rigorous(self) -> bool:
        return self.tag is Tag.GAP_CERTIFIED

    def label(self) -> str:
        if self.tag is Tag.COMPONENTS:
            return f"Components({self.components})"
        if self.tag is Tag.ZERO_PLUS_GEOMETRIC_TAIL:
            return f"ZeroPlusGeometricTail({format_rational(self.ratio)})"
        if self.tag is Tag.GAP_CERTIFIED:
            a, b = self.gap
            return f"GapCertified(({format_rational(a)}, {format_rational(b)}))"
        return self.tag.value

    def __str__(self) -> str:
        return self.label()


def _rows(sweep: Iterable) -> list:
    rows = []
    for r in sweep:
        if not isinstance(r, SweepRow):
            r = SweepRow(*r)
        rows.append(r)
    return rows


def certified_gaps(union: IntervalUnion, inner_points: Optional[Sequence] = None) -> list:
    """Bounded gaps of ``union`` with certified points on both sides.

    Without ``inner_points`` every endpoint of ``union`` counts as certified,
    which holds for products and sums of covers whose endpoints lie in the
    underlying sets.
    """
    U = _rational_union(union)
    gaps = U.gaps()
    if inner_points is None:
        return list(gaps)
    pts = sorted(Fraction(lower(p)) if upper(p) == lower(p) else p for p in inner_points)
    keys = [lower(p) for p in pts]
    out = []
    for g1, g2 in gaps:
        i = bisect_right(keys, g1)
        has_left = i > 0 and upper(pts[i - 1]) <= g1 and U.contains_point(pts[i - 1])
        j = bisect_left(keys, g2)
        has_right = j < len(pts) and lower(pts[j]) >= g2 and U.contains_point(pts[j])
        if has_left and has_right:
            out.append((g1, g2))
    return out


def largest_internal_gap(u: IntervalUnion):
    gs = _rational_union(u).gaps()
    return max((b - a for a, b in gs), default=Fraction(0))


def _window(u: IntervalUnion, lo: Fraction, hi: Fraction) -> tuple:
    return tuple(u.restrict(lo, hi).intervals)


def _close(w1: tuple, w2: tuple, tol: Fraction) -> bool:
    if len(w1) != len(w2):
        return False
    if tol == 0:
        return w1 == w2
    return all(abs(a - c) <= tol and abs(b - d) <= tol for (a, b), (c, d) in zip(w1, w2))


def scale_periodic(u: IntervalUnion, ratio: Fraction, periods: int = 2,
                   top: Optional[Fraction] = None, tolerance=Fraction(0)) -> Optional[dict]:
    """Check that u cap [r t, t] scaled by r equals u cap [r^2 t, r t], and so on.

    Windows are compared for ``periods`` consecutive steps (exactly, or with
    endpoints within ``tolerance * t`` for outward-rounded unions), and each
    window must contain a bounded gap.  Returns evidence or None.
    """
    U = _rational_union(u)
    pos = U.restrict(Fraction(0), None)
    if pos.is_empty or not 0 < ratio < 1:
        return None
    t = pos.right if top is None else top
    windows = []
    for k in range(periods + 1):
        hi = t * ratio ** k
        windows.append((ratio * hi, hi, _window(pos, ratio * hi, hi)))
    for lo, hi, w in windows:
        if len(w) < 2:
            return None
    for k in range(periods):
        lo, hi, w = windows[k]
        mapped = tuple((a * ratio, b * ratio) for a, b in w)
        if not _close(mapped, windows[k + 1][2], tolerance * t):
            return None
    return {"top": t, "periods": periods, "window_components": len(windows[0][2])}


def classify_structure(sweep: Sequence, ratio_hint: Optional[Fraction] = None,
                       persistence: int = 3, periods: int = 2,
                       tolerance=Fraction(0)) -> StructureVerdict:
    """Verdict for a sweep of nested unions ordered by depth."""
    rows = _rows(sweep)
    if not rows:
        raise ValueError("empty sweep")
    final = rows[-1]
    depths = tuple(r.depth for r in rows)
    gaps = tuple(certified_gaps(final.union, final.inner_points))
    evidence = {"components": [len(r.union) for r in rows],
                "hulls": [tuple(_rational_union(r.union).hull()) for r in rows],
                "evidence_bounds": [r.evidence_bound for r in rows]}
    widest = max(gaps, key=lambda g: g[1] - g[0]) if gaps else None
    if ratio_hint is not None:
        ev = scale_periodic(final.union, as_rational(ratio_hint), periods, None,
                            as_rational(tolerance))
        if ev is not None:
            evidence.update(ev)
            return StructureVerdict(Tag.ZERO_PLUS_GEOMETRIC_TAIL, depths, len(final.union),
                                    as_rational(ratio_hint), widest, gaps, evidence)
    tail = rows[-persistence:] if len(rows) >= persistence else []
    if tail:
        counts = {len(r.union) for r in tail}
        hulls = {tuple(_rational_union(r.union).hull()) for r in tail}
        if len(counts) == 1 and len(hulls) == 1:
            k = counts.pop()
            tag = Tag.SINGLE_INTERVAL if k == 1 else Tag.COMPONENTS
            return StructureVerdict(tag, depths, k, None, widest, gaps, evidence)
    if widest is not None:
        return StructureVerdict(Tag.GAP_CERTIFIED, depths, len(final.union), None, widest,
                                gaps, evidence)
    return StructureVerdict(Tag.INDETERMINATE, depths, len(final.union), None, None, (),
                            evidence)


SWEEP_HEADER = ["depth", "components", "hull_left", "hull_right", "largest_internal_gap"]


def sweep_csv(sweep: Sequence) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in _rows(sweep):
        U = _rational_union(r.union)
        a, b = U.hull()
        w.writerow([r.depth, len(U), format_rational(a), format_rational(b),
                    format_rational(largest_internal_gap(U))])
    return buf.getvalue()
