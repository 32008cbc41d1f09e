"""Finite outer covers of constructions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .arith import Enclosure, lower, upper
from .construction import (AffineImage, Construction, FiniteUnion,
                           GeometricStack, SubdivisionSystem, scale_value)
from .unions import IntervalUnion, normalize_union

DEFAULT_DEPTH = 8
DEFAULT_STACK_BLOCKS = 12


@dataclass(frozen=True)
class Gap:
    """Open complementary interval; ``None`` marks an infinite end."""

    left: object
    right: object

    @property
    def bounded(self) -> bool:
        return self.left is not None and self.right is not None

    @property
    def length(self):
        if not self.bounded:
            return None
        return self.right - self.left

    def __str__(self) -> str:
        lo = "-inf" if self.left is None else str(self.left)
        hi = "inf" if self.right is None else str(self.right)
        return f"({lo}, {hi})"


@dataclass(frozen=True)
class CoverApprox:
    """Depth-``depth`` outer cover of ``provenance`` (if known)."""

    depth: int
    intervals: IntervalUnion
    provenance: Optional[Construction] = None
    stack_blocks: int = DEFAULT_STACK_BLOCKS

    @property
    def gaps(self) -> list:
        """Left ray, bounded gaps in order, right ray."""
        if self.intervals.is_empty:
            return [Gap(None, None)]
        out = [Gap(None, self.intervals.left)]
        out.extend(Gap(a, b) for a, b in self.intervals.gaps())
        out.append(Gap(self.intervals.right, None))
        return out

    @property
    def bounded_gaps(self) -> list:
        return [Gap(a, b) for a, b in self.intervals.gaps()]


def as_cover(u, depth: int = 0) -> CoverApprox:
    """Wrap an IntervalUnion (or raw interval list) as a cover."""
    if not isinstance(u, IntervalUnion):
        u = normalize_union(u)
    return CoverApprox(depth, u)


def _mul(s, x):
    """s * x keeping exact zeros and exact enclosures as Fractions."""
    if x == 0:
        return Fraction(0)
    y = s * x
    if isinstance(y, Enclosure) and y.is_exact:
        return y.lo
    return y


@lru_cache(maxsize=256)
def _raw(c: Construction, depth: int, stack_blocks: int) -> tuple:
    if isinstance(c, SubdivisionSystem):
        a, b = c.hull
        if a == b:
            return ((a, a),)
        ivs = [(a, b)]
        for k in range(depth):
            pat = c.levels[k % len(c.levels)]
            ivs = [(x + (y - x) * u, x + (y - x) * v) for x, y in ivs for u, v in pat]
        return tuple(ivs)
    if isinstance(c, GeometricStack):
        blk = _raw(c.block, depth, stack_blocks)
        count = stack_blocks if c.infinite else c.blocks
        pos = []
        f = Fraction(1)
        for _ in range(count):
            pos.extend((_mul(f, x), _mul(f, y)) for x, y in blk)
            f *= c.ratio
        if c.infinite:
            pos.append((Fraction(0), _mul(f, c.block.bounds()[1])))
        elif c.includes_zero:
            pos.append((Fraction(0), Fraction(0)))
        if c.negative_scale is None:
            return tuple(pos)
        s = scale_value(c.negative_scale)
        neg = [(-_mul(s, y), -_mul(s, x)) for x, y in pos]
        return tuple(neg + pos)
    if isinstance(c, AffineImage):
        s = scale_value(c.scale)
        out = []
        for x, y in _raw(c.base, depth, stack_blocks):
            u, v = _mul(s, x) + c.shift, _mul(s, y) + c.shift
            out.append((u, v) if lower(s) > 0 else (v, u))
        return tuple(out)
    if isinstance(c, FiniteUnion):
        out = []
        for p in c.parts:
            out.extend(_raw(p, depth, stack_blocks))
        return tuple(out)
    raise TypeError(f"not a construction: {type(c).__name__}")


def refine(c: Construction, depth: int = DEFAULT_DEPTH,
           stack_blocks: int = DEFAULT_STACK_BLOCKS) -> CoverApprox:
    """Outer cover of ``c`` after ``depth`` subdivision steps.

    Infinite stacks keep ``stack_blocks`` explicit blocks and one tail
    interval ``[0, ratio**stack_blocks * block_right]``.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if stack_blocks < 1:
        raise ValueError("stack_blocks must be >= 1")
    return CoverApprox(depth, normalize_union(_raw(c, depth, stack_blocks)), c, stack_blocks)


def cover_endpoints(cv: CoverApprox) -> list:
    """Sorted interval endpoints; each is a point of the underlying set."""
    return cv.intervals.endpoints()


def positive_part(cv: CoverApprox) -> CoverApprox:
    """Cover of K intersected with [0, inf)."""
    out = []
    for a, b in cv.intervals:
        if upper(b) < 0:
            continue
        if lower(a) < 0:
            a = Fraction(0)
        out.append((a, b))
    return CoverApprox(cv.depth, IntervalUnion(tuple(out)), cv.provenance, cv.stack_blocks)


def negative_part(cv: CoverApprox) -> CoverApprox:
    """Reflected cover of K intersected with (-inf, 0], i.e. of -K_-."""
    out = []
    for a, b in reversed(cv.intervals.intervals):
        if lower(a) > 0:
            continue
        if upper(b) > 0:
            b = Fraction(0)
        out.append((-b, -a))
    return CoverApprox(cv.depth, IntervalUnion(tuple(out)), cv.provenance, cv.stack_blocks)
