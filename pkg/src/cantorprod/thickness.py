"""Newhouse thickness of finite covers and the gap calculus built on it.

For a cover with bounded gaps ``U`` the thickness is the infimum, over ordered
gap pairs at least one of which is bounded, of
``max(bridge / |U1|, bridge / |U2|)`` with unbounded gaps contributing 0.
It equals the minimum over bounded ``U`` of the distance to the nearest gap on
either side that is at least as large (rays count as infinitely large),
divided by ``|U|``; :func:`thickness` evaluates that form and
:func:`naive_thickness` the pairwise definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .core.arith import (DEFAULT_PRECISION, Enclosure, QuadSurd, as_rational, compare,
                         emax, log_enclosure, lower, sign, upper)
from .core.refine import CoverApprox, Gap, as_cover, negative_part, positive_part
from .core.unions import IntervalUnion, normalize_union

INFINITE = math.inf


class Indeterminate(ArithmeticError):
    """An enclosure straddles a decision boundary; retry at finer precision."""


class InsufficientDepth(RuntimeError):
    """The finite cover is too coarse to exhibit the requested object."""


@dataclass(frozen=True)
class ThicknessValue:
    """Thickness (rational, enclosure or ``math.inf``) and a minimizing pair."""

    value: object
    pair: Optional[tuple] = None

    @property
    def is_infinite(self) -> bool:
        return self.value is INFINITE

    def __str__(self) -> str:
        if self.is_infinite:
            return "inf"
        if isinstance(self.value, Enclosure):
            return str(self.value)
        v = Fraction(self.value)
        return f"{v.numerator}/{v.denominator}"


def _as_cover(cv) -> CoverApprox:
    return cv if isinstance(cv, CoverApprox) else as_cover(cv)


class _RangeMax:
    """Sparse table answering 'nearest index with key >= t' queries."""

    def __init__(self, keys: Sequence):
        self.n = len(keys)
        self.table = [list(keys)]
        step = 1
        while 2 * step <= self.n:
            prev = self.table[-1]
            self.table.append([max(prev[i], prev[i + step]) for i in range(self.n - 2 * step + 1)])
            step *= 2

    def nearest_left(self, i: int, t) -> Optional[int]:
        pos = i
        for k in range(len(self.table) - 1, -1, -1):
            w = 1 << k
            if pos - w >= 0 and self.table[k][pos - w] < t:
                pos -= w
        return pos - 1 if pos - 1 >= 0 else None

    def nearest_right(self, i: int, t) -> Optional[int]:
        pos = i + 1
        for k in range(len(self.table) - 1, -1, -1):
            w = 1 << k
            if pos + w <= self.n and self.table[k][pos] < t:
                pos += w
        return pos if pos < self.n else None


def thickness(cv) -> ThicknessValue:
    """Thickness of a finite cover by a nearest-larger-gap scan, O(G log G).

    With enclosure endpoints the result is an enclosure of the thickness of
    every cover compatible with the endpoint enclosures.
    """
    cv = _as_cover(cv)
    ivs = cv.intervals
    if ivs.is_empty:
        raise ValueError("thickness of an empty cover")
    gaps = ivs.gaps()
    if not gaps:
        return ThicknessValue(INFINITE)
    kl, kr = ivs.left, ivs.right
    sizes = [b - a for a, b in gaps]
    if ivs.is_exact:
        lo_keys = hi_keys = sizes
    else:
        lo_keys = [lower(s) for s in sizes]
        hi_keys = [upper(s) for s in sizes]
    rm_hi = _RangeMax(hi_keys)
    rm_lo = rm_hi if hi_keys is lo_keys else _RangeMax(lo_keys)

    best_lo = best_hi = None
    pair = None
    for i, (gl, gr) in enumerate(gaps):
        # lower bound: nearest gap that may be >= |U|; upper: certainly >=
        jl = rm_hi.nearest_left(i, lo_keys[i])
        jr = rm_hi.nearest_right(i, lo_keys[i])
        left_lo = lower(gl) - upper(kl if jl is None else gaps[jl][1])
        right_lo = lower(kr if jr is None else gaps[jr][0]) - upper(gr)
        v_lo = min(left_lo, right_lo) / hi_keys[i]
        if rm_lo is rm_hi:
            v_hi = v_lo
        else:
            kl_ = rm_lo.nearest_left(i, hi_keys[i])
            kr_ = rm_lo.nearest_right(i, hi_keys[i])
            left_hi = upper(gl) - lower(kl if kl_ is None else gaps[kl_][1])
            right_hi = upper(kr if kr_ is None else gaps[kr_][0]) - lower(gr)
            v_hi = min(left_hi, right_hi) / lo_keys[i]
        if best_lo is None or v_lo < best_lo:
            best_lo = v_lo
            u = Gap(gl, gr)
            if left_lo <= right_lo:
                other = Gap(None, kl) if jl is None else Gap(*gaps[jl])
                pair = (other, u)
            else:
                other = Gap(kr, None) if jr is None else Gap(*gaps[jr])
                pair = (u, other)
        if best_hi is None or v_hi < best_hi:
            best_hi = v_hi
    if best_lo == best_hi:
        return ThicknessValue(best_lo, pair)
    return ThicknessValue(Enclosure(best_lo, best_hi), pair)


def naive_thickness(cv) -> ThicknessValue:
    """All-pairs evaluation of the definition; O(G^2), used as an oracle."""
    cv = _as_cover(cv)
    if cv.intervals.is_empty:
        raise ValueError("thickness of an empty cover")
    gaps = cv.gaps
    if len(gaps) == 2:
        return ThicknessValue(INFINITE)
    best_lo = best_hi = None
    pair = None
    n = len(gaps)
    for i in range(n):
        for j in range(i + 1, n):
            u1, u2 = gaps[i], gaps[j]
            if not u1.bounded and not u2.bounded:
                continue
            bridge = u2.left - u1.right
            r1 = bridge / u1.length if u1.bounded else Fraction(0)
            r2 = bridge / u2.length if u2.bounded else Fraction(0)
            v = emax(r1, r2)
            if best_lo is None or lower(v) < best_lo:
                best_lo = lower(v)
                pair = (u1, u2)
            if best_hi is None or upper(v) < best_hi:
                best_hi = upper(v)
    if best_lo == best_hi:
        return ThicknessValue(best_lo, pair)
    return ThicknessValue(Enclosure(best_lo, best_hi), pair)


def split_at_max_gap(cv) -> tuple:
    """Pieces of the cover left and right of its largest bounded gap."""
    cv = _as_cover(cv)
    gaps = cv.intervals.gaps()
    if not gaps:
        raise ValueError("cover has no bounded gap")
    sizes = [b - a for a, b in gaps]
    best = 0
    for i, s in enumerate(sizes[1:], 1):
        c = compare(s, sizes[best])
        if c is None:
            raise Indeterminate("largest gap not decidable at this precision")
        if c > 0:
            best = i
    ivs = cv.intervals.intervals
    left = CoverApprox(cv.depth, IntervalUnion(ivs[: best + 1]), cv.provenance, cv.stack_blocks)
    right = CoverApprox(cv.depth, IntervalUnion(ivs[best + 1:]), cv.provenance, cv.stack_blocks)
    return left, right


class GapTag(Enum):
    NICE = "nice"
    C_GAP = "c-gap"
    BAD = "bad"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class GapClass:
    """Classification of a positive-side gap by the ratio U^L / |U| against C."""

    tag: GapTag
    C: Fraction
    ratio: object

    @property
    def is_nice(self) -> bool:
        return self.tag in (GapTag.NICE, GapTag.C_GAP)

    @property
    def is_bad(self) -> bool:
        return self.tag is GapTag.BAD


def gap_ratio(gap: Gap):
    return gap.left / gap.length


def classify_gap(cv, gap: Gap, C) -> GapClass:
    C = as_rational(C)
    if not gap.bounded:
        raise ValueError("only bounded gaps are classified")
    if not lower(gap.left) > 0:
        raise ValueError("gap must lie in (0, inf)")
    ratio = gap_ratio(gap)
    c = compare(ratio, C)
    tag = {1: GapTag.NICE, 0: GapTag.C_GAP, -1: GapTag.BAD, None: GapTag.INDETERMINATE}[c]
    return GapClass(tag, C, ratio)


def classify_gaps(cv, C) -> list:
    """(gap, class) for every bounded gap of the positive part."""
    pos = positive_part(_as_cover(cv))
    return [(g, classify_gap(pos, g, C)) for g in pos.bounded_gaps]


@dataclass(frozen=True)
class SplitDecomposition:
    """Bad gaps ``U_0 > U_1 > ...`` (U_0 the right ray) and the nice runs between."""

    split_gaps: tuple
    split_sets: tuple
    finite: bool = True
    reaches_zero: bool = False


def _piece(cv: CoverApprox, lo, hi) -> CoverApprox:
    ivs = [(a, b) for a, b in cv.intervals if lower(a) >= lower(lo) and upper(b) <= upper(hi)]
    return CoverApprox(cv.depth, IntervalUnion(tuple(ivs)), cv.provenance, cv.stack_blocks)


def split_decomposition(cv, C) -> SplitDecomposition:
    """Scan K_+ from the right, cutting at every C-bad gap.

    At finite depth the scan always terminates, so ``finite`` is True;
    ``reaches_zero`` records whether the last piece touches 0.
    """
    pos = positive_part(_as_cover(cv))
    if pos.intervals.is_empty:
        raise ValueError("the positive part is empty")
    C = as_rational(C)
    right = pos.intervals.right
    split_gaps = [Gap(right, None)]
    sets = []
    boundary = right
    for g in reversed(pos.bounded_gaps):
        if lower(g.left) <= 0:
            continue
        cls = classify_gap(pos, g, C)
        if cls.tag is GapTag.INDETERMINATE:
            raise Indeterminate(f"gap {g} straddles the C-boundary")
        if cls.is_bad:
            sets.append(_piece(pos, g.right, boundary))
            split_gaps.append(g)
            boundary = g.left
    sets.append(_piece(pos, pos.intervals.left, boundary))
    return SplitDecomposition(tuple(split_gaps), tuple(sets), True,
                              pos.intervals.left == 0)


@dataclass(frozen=True)
class LogCover:
    """A piece X of -K_- covering a bad gap W of K_+ in log coordinates.

    Coordinates are magnitudes (K_- reflected to the positive side).
    ``x_left`` is None when X reaches 0, i.e. X^L = -inf after the log map.
    """

    gap: Gap
    piece: IntervalUnion
    x_left: object
    x_right: object
    upper_gap: Gap
    lower_gap: Optional[Gap]
    bound: Fraction
    upper_ratio: object
    lower_ratio: object

    @property
    def extended(self) -> bool:
        return self.x_left is None


def find_cover(cv, C, bad_gap: Gap, tau=None) -> LogCover:
    """Locate the log-cover of a C-bad gap of K_+ inside K_-.

    The upper delimiter is the nearest C-bad gap of K_- (measured outward
    from 0) at least as large as the bad gap, the right ray counting as an
    infinitely large bad gap; the lower delimiter is the nearest C-bad gap
    below it.  Both conclusions are checked exactly:
    ``X^R / W^R > (tau - C)/(1 + C)`` and ``W^L / X^L > (tau - C)/(1 + C)``.
    """
    cv = _as_cover(cv)
    C = as_rational(C)
    if tau is None:
        tau = thickness(cv).value
    if tau is not INFINITE and compare(C, tau) != -1:
        raise ValueError(f"need C < thickness, got C={C}, thickness={tau}")
    W = bad_gap
    if not classify_gap(cv, W, C).is_bad:
        raise ValueError(f"gap {W} is not C-bad for C={C}")
    neg = negative_part(cv)
    if neg.intervals.is_empty or neg.intervals.right == 0:
        raise InsufficientDepth("the negative part is empty at this depth")
    bad = []
    for g in neg.bounded_gaps:
        if lower(g.left) <= 0:
            continue
        cls = classify_gap(neg, g, C)
        if cls.tag is GapTag.INDETERMINATE:
            raise Indeterminate(f"gap {g} of K_- straddles the C-boundary")
        if cls.is_bad:
            bad.append(g)
    size = W.length
    upper_idx = None
    for i, g in enumerate(bad):
        c = compare(g.length, size)
        if c is None:
            raise Indeterminate("gap sizes not separable at this precision")
        if c >= 0:
            upper_idx = i
            break
    if upper_idx is None:
        upper_gap = Gap(neg.intervals.right, None)
        x_right = neg.intervals.right
        below = bad
    else:
        upper_gap = bad[upper_idx]
        x_right = upper_gap.left
        below = bad[:upper_idx]
    lower_gap = below[-1] if below else None
    x_left = lower_gap.right if lower_gap is not None else None
    lo_cut = x_left if x_left is not None else Fraction(0)
    piece = IntervalUnion(tuple((a, b) for a, b in neg.intervals
                                if lower(a) >= lower(lo_cut) and upper(b) <= upper(x_right)))
    if tau is INFINITE:
        raise ValueError("cover has no bounded gap")
    bound = (tau - C) / (1 + C)
    upper_ratio = x_right / W.right
    lower_ratio = None if x_left is None else W.left / x_left
    ok_up = sign(upper_ratio - bound)
    ok_low = 1 if lower_ratio is None else sign(lower_ratio - bound)
    if ok_up is None or ok_low is None:
        raise Indeterminate("cover conclusions straddle the bound")
    if ok_up <= 0 or ok_low <= 0:
        raise InsufficientDepth("no admissible cover at this depth")
    return LogCover(W, piece, x_left, x_right, upper_gap, lower_gap, bound,
                    upper_ratio, lower_ratio)


def f_k(k, x, precision=DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of log(1 + k x / (1 + x)) / log(1 + x)."""
    k, x = as_rational(k), as_rational(x)
    if k <= 0 or x <= 0:
        raise ValueError("f_k needs k > 0 and x > 0")
    # relative accuracy of a quotient of small logs needs extra digits
    den = log_enclosure(1 + x, precision * x / 8)
    num = log_enclosure(1 + k * x / (1 + x), precision * x / 8)
    return num / den


def log_thickness_bound(tau, C, precision=DEFAULT_PRECISION) -> Enclosure:
    """Lower bound log(1 + tau/(1+C)) / log(1 + 1/C) for log-image thickness."""
    tau, C = as_rational(tau), as_rational(C)
    if tau <= 0 or C <= 0:
        raise ValueError("tau and C must be positive")
    return f_k(tau, 1 / C, precision)


@dataclass(frozen=True)
class NicenessConstants:
    x: object
    y: object
    C_xy: object
    C_yx: object
    condition_holds: bool
    product: object = None
    product_at_least_one: Optional[bool] = None


def niceness_constants(x, y) -> NicenessConstants:
    """C_xy = (x+1)/(xy-1), C_yx = (y+1)/(xy-1) for rationals or surds.

    When 2(x+1)(y+1) <= (xy-1)^2 the product
    ((x-C_xy)/(1+C_xy)) * ((y-C_yx)/(1+C_yx)) is evaluated and compared
    with 1 exactly.
    """
    if not isinstance(x, QuadSurd):
        x = as_rational(x)
    if not isinstance(y, QuadSurd):
        y = as_rational(y)
    xy1 = x * y - 1
    if sign(xy1) != 1:
        raise ValueError("niceness constants need xy > 1")
    cxy = (x + 1) / xy1
    cyx = (y + 1) / xy1
    holds = sign(xy1 * xy1 - 2 * (x + 1) * (y + 1)) >= 0
    product = at_least = None
    if holds:
        product = ((x - cxy) / (1 + cxy)) * ((y - cyx) / (1 + cyx))
        at_least = sign(product - 1) >= 0
    return NicenessConstants(x, y, cxy, cyx, holds, product, at_least)


def log_distortion(cv, precision=DEFAULT_PRECISION) -> tuple:
    """Range (C1, C2) of the log triple-ratio distortion over cover endpoints.

    For endpoints p1 < p2 < p3 the distortion is
    ``[log(p3/p2) / log(p2/p1)] / [(p3 - p2) / (p2 - p1)]``; C1 is a lower
    bound of its minimum and C2 an upper bound of its maximum.  O(n^3) in
    the number of endpoints, meant for small covers.
    """
    cv = _as_cover(cv)
    if not cv.intervals.is_exact:
        raise ValueError("log_distortion needs exact endpoints")
    pts = cv.intervals.endpoints()
    if len(pts) < 3:
        raise ValueError("need at least three endpoints")
    if not pts[0] > 0:
        raise ValueError("log distortion of a cover touching (-inf, 0]")
    logs = {}

    def lg(q):
        if q not in logs:
            logs[q] = log_enclosure(q, precision)
        return logs[q]

    lo = hi = None
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            inner = lg(pts[j] / pts[i])
            for k in range(j + 1, n):
                d = lg(pts[k] / pts[j]) / inner * ((pts[j] - pts[i]) / (pts[k] - pts[j]))
                lo = d.lo if lo is None else min(lo, d.lo)
                hi = d.hi if hi is None else max(hi, d.hi)
    return lo, hi


def distortion_thickness_bounds(tau, C1, C2) -> tuple:
    """Bounds on the thickness of f(K) from distortion range [C1, C2] of f on K.

    A bridge-to-left-gap ratio is a forward triple ratio and scales within
    [C1, C2]; a bridge-to-right-gap ratio is a reciprocal one and scales
    within [1/C2, 1/C1].  Hence ``min(C1, 1/C2) tau <= tau(f K) <= max(C2, 1/C1) tau``.
    """
    C1, C2 = as_rational(C1), as_rational(C2)
    if not 0 < C1 <= C2:
        raise ValueError("need 0 < C1 <= C2")
    return min(C1, 1 / C2) * tau, max(C2, 1 / C1) * tau


def log_map_cover(cv, precision=DEFAULT_PRECISION) -> CoverApprox:
    """Cover of log(K) for a cover of a set contained in (0, inf)."""
    cv = _as_cover(cv)
    out = []
    for a, b in cv.intervals:
        if not lower(a) > 0:
            raise ValueError("log of a cover touching (-inf, 0]")
        la = log_enclosure(a, precision)
        lb = log_enclosure(b, precision)
        out.append((la, lb))
    return CoverApprox(cv.depth, normalize_union(out), cv.provenance, cv.stack_blocks)
