"""Declarative descriptions of Cantor sets.

Four node types compose recursively:

* :class:`SubdivisionSystem` - repeated replacement of each interval by a
  pattern of children touching both of its ends.
* :class:`GeometricStack` - copies ``ratio**n * block`` for ``n = 0, 1, ...``,
  optionally accumulating at 0 and mirrored to the negative side.
* :class:`AffineImage` - ``scale * X + shift``.
* :class:`FiniteUnion` - disjoint union of parts.

All nodes are frozen and hashable, so refinements can be cached.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .arith import SqrtParam, as_rational, lower, upper

Scale = Union[Fraction, SqrtParam]


def scale_value(s: Scale):
    """Rational or enclosure value of a scale parameter."""
    return s.value() if isinstance(s, SqrtParam) else s


@dataclass(frozen=True)
class SubdivisionSystem:
    """Self-similar refinement of ``hull`` by cycling through ``levels``.

    Each level is a tuple of child positions ``(u, v)`` relative to the parent
    interval; the first child starts at 0, the last ends at 1 and children are
    strictly separated.  A degenerate hull ``(a, a)`` is the single point a.
    ``tau`` optionally records a closed-form thickness.
    """

    hull: tuple
    levels: tuple
    tau: Optional[Fraction] = None

    def __post_init__(self):
        a, b = (as_rational(x) for x in self.hull)
        if a > b:
            raise ValueError("hull with left > right")
        object.__setattr__(self, "hull", (a, b))
        levels = tuple(tuple((as_rational(u), as_rational(v)) for u, v in lvl)
                       for lvl in self.levels)
        if a < b and not levels:
            raise ValueError("a non-degenerate subdivision system needs a level")
        for lvl in levels:
            _check_pattern(lvl)
        object.__setattr__(self, "levels", levels)
        if self.tau is not None:
            object.__setattr__(self, "tau", as_rational(self.tau))

    def bounds(self):
        return self.hull


def _check_pattern(lvl) -> None:
    if len(lvl) < 2:
        raise ValueError("each level needs at least two children")
    if lvl[0][0] != 0 or lvl[-1][1] != 1:
        raise ValueError("children must touch both ends of the parent")
    for u, v in lvl:
        if not 0 <= u < v <= 1:
            raise ValueError(f"child ({u}, {v}) is not a proper sub-interval")
    for (_, v1), (u2, _) in zip(lvl, lvl[1:]):
        if not v1 < u2:
            raise ValueError("children overlap or touch")


@dataclass(frozen=True)
class GeometricStack:
    """Union of ``ratio**n * block`` over ``n < blocks`` (``None`` = infinitely many).

    ``includes_zero`` adds the point 0 (automatic for infinite stacks, whose
    blocks accumulate there).  ``negative_scale`` sigma adds the mirror copy
    ``-sigma * (positive part)``.
    """

    block: "Construction"
    ratio: Fraction
    blocks: Optional[int] = None
    includes_zero: bool = True
    negative_scale: Optional[Scale] = None

    def __post_init__(self):
        ratio = as_rational(self.ratio)
        object.__setattr__(self, "ratio", ratio)
        if not 0 < ratio < 1:
            raise ValueError(f"stack ratio {ratio} outside (0, 1)")
        if self.blocks is not None and self.blocks < 1:
            raise ValueError("a finite stack needs at least one block")
        if self.blocks is None and not self.includes_zero:
            raise ValueError("an infinite stack always contains 0")
        lo, hi = self.block.bounds()
        if not lower(lo) > 0:
            raise ValueError("stack block must lie in (0, inf)")
        if not upper(ratio * hi) < lower(lo):
            raise ValueError("consecutive scaled blocks overlap or touch")
        s = self.negative_scale
        if s is not None:
            if not isinstance(s, SqrtParam):
                s = as_rational(s)
                object.__setattr__(self, "negative_scale", s)
            if not lower(scale_value(s)) > 0:
                raise ValueError("negative scale must be positive")

    @property
    def infinite(self) -> bool:
        return self.blocks is None

    def positive_bounds(self):
        lo, hi = self.block.bounds()
        if self.includes_zero:
            return (Fraction(0), hi)
        return (lo * self.ratio ** (self.blocks - 1), hi)

    def bounds(self):
        lo, hi = self.positive_bounds()
        if self.negative_scale is None:
            return (lo, hi)
        return (-(scale_value(self.negative_scale) * hi), hi)


@dataclass(frozen=True)
class AffineImage:
    """``scale * base + shift``; scale may be a rational or a square root."""

    scale: Scale
    shift: Fraction
    base: "Construction"

    def __post_init__(self):
        if not isinstance(self.scale, SqrtParam):
            object.__setattr__(self, "scale", as_rational(self.scale))
            if self.scale == 0:
                raise ValueError("affine scale must be nonzero")
        object.__setattr__(self, "shift", as_rational(self.shift))

    def bounds(self):
        lo, hi = self.base.bounds()
        s = scale_value(self.scale)
        x, y = lo * s + self.shift, hi * s + self.shift
        return (x, y) if lower(s) > 0 else (y, x)


@dataclass(frozen=True)
class FiniteUnion:
    """Union of parts whose hulls are disjoint apart from shared endpoints."""

    parts: tuple = field(default_factory=tuple)

    def __post_init__(self):
        parts = tuple(sorted(self.parts, key=lambda c: lower(c.bounds()[0])))
        if not parts:
            raise ValueError("empty union")
        for p, q in zip(parts, parts[1:]):
            if upper(p.bounds()[1]) > lower(q.bounds()[0]):
                raise ValueError("union parts overlap")
        object.__setattr__(self, "parts", parts)

    def bounds(self):
        return (self.parts[0].bounds()[0], self.parts[-1].bounds()[1])


Construction = Union[SubdivisionSystem, GeometricStack, AffineImage, FiniteUnion]


def point_set(x) -> SubdivisionSystem:
    x = as_rational(x)
    return SubdivisionSystem((x, x), ())


def hull_of(c: Construction):
    """Convex hull endpoints (rationals or enclosures)."""
    return c.bounds()
