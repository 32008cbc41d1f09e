"""Normalized finite unions of closed intervals."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .arith import Enclosure, emax, lower, upper

Interval = tuple  # (left, right); endpoints are Fractions or Enclosures


def _check(a, b) -> None:
    if lower(a) > upper(b):
        raise ValueError(f"interval with left > right: [{a}, {b}]")


def normalize_union(raw: Iterable[Sequence]) -> "IntervalUnion":
    """Sort and merge closed intervals; touching intervals coalesce.

    With enclosure endpoints two neighbours are merged whenever they might
    meet (``next.left.lo <= current.right.hi``), which keeps the result a
    superset of the true union.
    """
    items = []
    for a, b in raw:
        if not isinstance(a, Enclosure):
            a = Fraction(a)
        if not isinstance(b, Enclosure):
            b = Fraction(b)
        _check(a, b)
        items.append((a, b))
    if not items:
        return IntervalUnion(())
    if all(type(a) is Fraction and type(b) is Fraction for a, b in items):
        items.sort()
        out = []
        cur_a, cur_b = items[0]
        for a, b in items[1:]:
            if a <= cur_b:
                if b > cur_b:
                    cur_b = b
            else:
                out.append((cur_a, cur_b))
                cur_a, cur_b = a, b
        out.append((cur_a, cur_b))
        return IntervalUnion(tuple(out))
    items.sort(key=lambda iv: (lower(iv[0]), upper(iv[0])))
    out = []
    cur_a, cur_b = items[0]
    for a, b in items[1:]:
        if lower(a) <= upper(cur_b):
            cur_b = emax(cur_b, b)
        else:
            out.append((cur_a, cur_b))
            cur_a, cur_b = a, b
    out.append((cur_a, cur_b))
    return IntervalUnion(tuple(out))


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, pairwise disjoint, non-touching closed intervals.

    Build instances through :func:`normalize_union`; the constructor trusts
    its input.
    """

    intervals: tuple = ()

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __getitem__(self, i):
        return self.intervals[i]

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_exact(self) -> bool:
        return all(not isinstance(x, Enclosure) for iv in self.intervals for x in iv)

    @property
    def left(self):
        return self.intervals[0][0]

    @property
    def right(self):
        return self.intervals[-1][1]

    def hull(self) -> Interval:
        if not self.intervals:
            raise ValueError("empty union has no hull")
        return (self.left, self.right)

    def diameter(self):
        return self.right - self.left

    def gaps(self) -> list:
        """Bounded complementary gaps as (left, right) pairs, in order."""
        return [(self.intervals[i][1], self.intervals[i + 1][0])
                for i in range(len(self.intervals) - 1)]

    def endpoints(self) -> list:
        pts = []
        for a, b in self.intervals:
            pts.append(a)
            if b is not a and b != a:
                pts.append(b)
        return pts

    def outer(self) -> "IntervalUnion":
        """Rational superset: enclosure endpoints rounded outward."""
        if self.is_exact:
            return self
        return normalize_union((lower(a), upper(b)) for a, b in self.intervals)

    def inner(self) -> "IntervalUnion":
        """Rational subset of each interval (may drop intervals)."""
        out = [(upper(a), lower(b)) for a, b in self.intervals]
        return normalize_union((a, b) for a, b in out if a <= b)

    def contains_point(self, x) -> bool:
        u = self.outer()
        lefts = [a for a, _ in u.intervals]
        i = bisect_right(lefts, lower(x)) - 1
        return i >= 0 and upper(x) <= u.intervals[i][1]

    def contains_interval(self, a, b) -> bool:
        u = self.outer()
        lefts = [l for l, _ in u.intervals]
        i = bisect_right(lefts, lower(a)) - 1
        return i >= 0 and upper(b) <= u.intervals[i][1]

    def issubset(self, other: "IntervalUnion") -> bool:
        """Exact inclusion test (enclosures: self's outer in other's inner)."""
        inner = other.inner() if not other.is_exact else other
        lefts = [l for l, _ in inner.intervals]
        for a, b in self.outer():
            i = bisect_right(lefts, a) - 1
            if i < 0 or b > inner.intervals[i][1]:
                return False
        return True

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        """Intersection of two exact unions by a linear merge."""
        a, b = self.outer().intervals, other.outer().intervals
        out = []
        i = j = 0
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return normalize_union(out)

    def scaled(self, factor: Fraction, shift: Fraction = Fraction(0)) -> "IntervalUnion":
        return normalize_union(_affine(iv, factor, shift) for iv in self.intervals)

    def restrict(self, lo: Optional[Fraction] = None, hi: Optional[Fraction] = None) -> "IntervalUnion":
        """Clip an exact union to [lo, hi] (either side may be open-ended)."""
        out = []
        for a, b in self.intervals:
            if lo is not None:
                if b < lo:
                    continue
                a = max(a, lo)
            if hi is not None:
                if a > hi:
                    continue
                b = min(b, hi)
            out.append((a, b))
        return IntervalUnion(tuple(out))

    def __str__(self) -> str:
        return " U ".join(f"[{a}, {b}]" for a, b in self.intervals) or "{}"


def _affine(iv: Interval, factor, shift) -> Interval:
    a, b = iv
    x, y = a * factor + shift, b * factor + shift
    if lower(factor) >= 0:
        return (x, y)
    return (y, x)


def hausdorff_distance(A: IntervalUnion, B: IntervalUnion) -> Fraction:
    """Exact Hausdorff distance between two nonempty exact unions."""
    A, B = A.outer(), B.outer()
    if A.is_empty or B.is_empty:
        raise ValueError("Hausdorff distance of an empty union")
    return max(_directed(A, B), _directed(B, A))


def _directed(A: IntervalUnion, B: IntervalUnion) -> Fraction:
    """sup over x in A of dist(x, B)."""
    # the sup is attained at an endpoint of A or at a midpoint of a gap of B
    # lying inside A
    cand = list(A.endpoints())
    for g1, g2 in B.gaps():
        m = (g1 + g2) / 2
        if A.contains_point(m):
            cand.append(m)
    lefts = [a for a, _ in B.intervals]
    best = Fraction(0)
    for x in cand:
        i = bisect_right(lefts, x) - 1
        if i >= 0 and x <= B.intervals[i][1]:
            continue
        d = None
        if i >= 0:
            d = x - B.intervals[i][1]
        if i + 1 < len(B.intervals):
            e = B.intervals[i + 1][0] - x
            d = e if d is None else min(d, e)
        best = max(best, d)
    return best
