"""Exact rationals, outward-rounded enclosures and quadratic surds.

Every irrational quantity in the package is carried as an :class:`Enclosure`,
a closed rational interval guaranteed to contain the true value.  Decisions
that depend on the sign of an enclosure return ``None`` when the interval
straddles zero; callers treat that as "indeterminate" and may retry with a
finer precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from mpmath import iv
from mpmath.libmp import to_rational

DEFAULT_PRECISION = Fraction(1, 2**64)

Number = Union[int, Fraction, "Enclosure"]


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, an integer or a decimal string into an exact Fraction.

    Floats are never involved: ``"0.05"`` becomes ``Fraction(1, 20)``.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty rational literal")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {text!r}") from exc


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def format_rational(x: Fraction) -> str:
    """Always ``p/q``, also for integers (``1`` prints as ``1/1``)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Enclosure:
    """Closed interval [lo, hi] of rationals containing one unknown real."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        if lo > hi:
            raise ValueError(f"enclosure with lo > hi: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x) -> "Enclosure":
        x = as_rational(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, Enclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def overlaps(self, other: "Enclosure") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def hull(self, other) -> "Enclosure":
        other = to_enclosure(other)
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return Enclosure(self.lo + other, self.hi + other)
        if isinstance(other, Enclosure):
            return Enclosure(self.lo + other.lo, self.hi + other.hi)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Enclosure)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            a, b = self.lo * other, self.hi * other
            return Enclosure(min(a, b), max(a, b))
        if isinstance(other, Enclosure):
            ps = (self.lo * other.lo, self.lo * other.hi,
                  self.hi * other.lo, self.hi * other.hi)
            return Enclosure(min(ps), max(ps))
        return NotImplemented

    __rmul__ = __mul__

    def reciprocal(self) -> "Enclosure":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("enclosure contains zero")
        return Enclosure(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        if isinstance(other, Enclosure):
            return self * other.reciprocal()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.reciprocal() * other
        return NotImplemented

    def __str__(self) -> str:
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


Real = Union[Fraction, Enclosure]


def lower(x) -> Fraction:
    return x.lo if isinstance(x, Enclosure) else x


def upper(x) -> Fraction:
    return x.hi if isinstance(x, Enclosure) else x


def to_enclosure(x) -> Enclosure:
    if isinstance(x, Enclosure):
        return x
    if isinstance(x, QuadSurd):
        return x.enclosure()
    return Enclosure.point(x)


def sign(x) -> Optional[int]:
    """Exact sign of a rational, enclosure or surd; None if undecidable."""
    if isinstance(x, QuadSurd):
        return x.sign()
    if isinstance(x, Enclosure):
        if x.lo > 0:
            return 1
        if x.hi < 0:
            return -1
        if x.lo == x.hi == 0:
            return 0
        return None
    return (x > 0) - (x < 0)


def compare(a, b) -> Optional[int]:
    """-1, 0 or 1 for a <, =, > b; None when enclosures straddle."""
    if isinstance(a, QuadSurd) or isinstance(b, QuadSurd):
        return sign(QuadSurd.lift(a, b) - b)
    return sign(a - b)


def certainly_lt(a, b) -> bool:
    return upper(a) < lower(b)


def certainly_le(a, b) -> bool:
    return upper(a) <= lower(b)


def emin(a, b):
    """Enclosure of min(a, b) for rationals or enclosures."""
    if isinstance(a, Enclosure) or isinstance(b, Enclosure):
        return Enclosure(min(lower(a), lower(b)), min(upper(a), upper(b)))
    return min(a, b)


def emax(a, b):
    if isinstance(a, Enclosure) or isinstance(b, Enclosure):
        return Enclosure(max(lower(a), lower(b)), max(upper(a), upper(b)))
    return max(a, b)


def _bits_for(precision: Fraction) -> int:
    """Smallest k with 2**-k <= precision."""
    precision = as_rational(precision)
    if precision <= 0:
        raise ValueError("precision must be positive")
    k = 0
    while Fraction(1, 2**k) > precision:
        k += 1
    return k


def sqrt_enclosure(r, precision=DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of sqrt(r) of width at most ``precision``.

    Uses integer square roots on a dyadic grid, so no floating point is
    involved; perfect squares come back exact.
    """
    r = as_rational(r)
    if r < 0:
        raise ValueError(f"negative radicand {r}")
    p, q = r.numerator, r.denominator
    sp, sq = math.isqrt(p), math.isqrt(q)
    if sp * sp == p and sq * sq == q:
        return Enclosure.point(Fraction(sp, sq))
    k = _bits_for(precision)
    scale = 2**k
    # floor(sqrt(r) * scale) == isqrt(floor(r * scale**2))
    n = math.isqrt((p * scale * scale) // q)
    return Enclosure(Fraction(n, scale), Fraction(n + 1, scale))


def _mpf_rational(v) -> Fraction:
    num, den = to_rational(v)
    return Fraction(int(num), int(den))


def _iv_of(x):
    """Rigorous mpmath interval containing the rational or enclosure x."""
    lo, hi = lower(x), upper(x)
    a = iv.mpf(lo.numerator) / iv.mpf(lo.denominator)
    if hi == lo:
        return a
    b = iv.mpf(hi.numerator) / iv.mpf(hi.denominator)
    return iv.mpf([a.a, b.b])


def _iv_call(fn, x, precision) -> Enclosure:
    precision = as_rational(precision)
    bits = _bits_for(precision) + 20
    saved = iv.prec
    prev = None
    try:
        while True:
            iv.prec = bits
            lo_t, hi_t = fn(_iv_of(x))._mpi_
            out = Enclosure(_mpf_rational(lo_t), _mpf_rational(hi_t))
            if out.width <= precision:
                return out
            # a wide input bounds the output width; stop once extra working
            # precision no longer helps
            if prev is not None and out.width * 2 > prev:
                return out
            prev = out.width
            bits *= 2
    finally:
        iv.prec = saved


def log_enclosure(x, precision=DEFAULT_PRECISION) -> Enclosure:
    """Outward-rounded natural log of a positive rational or enclosure."""
    if lower(x) <= 0:
        raise ValueError("log of a non-positive value")
    if not isinstance(x, Enclosure) and x == 1:
        return Enclosure.point(0)
    return _iv_call(iv.log, x, precision)


def exp_enclosure(x, precision=DEFAULT_PRECISION) -> Enclosure:
    if not isinstance(x, Enclosure) and x == 0:
        return Enclosure.point(1)
    return _iv_call(iv.exp, x, precision)


@dataclass(frozen=True)
class SqrtParam:
    """sqrt(radicand) carried symbolically; enclosed on demand."""

    radicand: Fraction
    precision: Fraction = DEFAULT_PRECISION

    def __post_init__(self):
        object.__setattr__(self, "radicand", as_rational(self.radicand))
        object.__setattr__(self, "precision", as_rational(self.precision))
        if self.radicand < 0:
            raise ValueError("negative radicand")

    def value(self) -> Real:
        enc = sqrt_enclosure(self.radicand, self.precision)
        return enc.lo if enc.is_exact else enc


@dataclass(frozen=True)
class QuadSurd:
    """Exact element a + b*sqrt(d) of a real quadratic field."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", as_rational(self.a))
        object.__setattr__(self, "b", as_rational(self.b))
        if self.d <= 0:
            raise ValueError("radicand must be positive")

    @staticmethod
    def lift(x, like: "QuadSurd | object") -> "QuadSurd":
        if isinstance(x, QuadSurd):
            return x
        d = like.d if isinstance(like, QuadSurd) else 1
        return QuadSurd(as_rational(x), Fraction(0), d)

    def _coerce(self, other) -> "QuadSurd":
        other = QuadSurd.lift(other, self)
        if other.b != 0 and self.b != 0 and other.d != self.d:
            raise ValueError("surds from different quadratic fields")
        if other.b == 0:
            return QuadSurd(other.a, Fraction(0), self.d)
        return other

    def _field(self, other) -> int:
        return self.d if self.b != 0 else other.d

    def __add__(self, other):
        o = self._coerce(other)
        return QuadSurd(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        d = self._field(o)
        return QuadSurd(self.a * o.a + self.b * o.b * d,
                        self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadSurd":
        return QuadSurd(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def reciprocal(self) -> "QuadSurd":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero surd")
        c = self.conjugate()
        return QuadSurd(c.a / n, c.b / n, self.d)

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n: int):
        out = QuadSurd(Fraction(1), Fraction(0), self.d)
        for _ in range(n):
            out = out * self
        return out

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 d
        diff = self.a * self.a - self.b * self.b * self.d
        return sa if diff > 0 else (0 if diff == 0 else sb)

    def __eq__(self, other):
        if isinstance(other, (QuadSurd, int, Fraction)):
            return (self - other).sign() == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b if self.b else 0, self.d if self.b else 1))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def enclosure(self, precision=DEFAULT_PRECISION) -> Enclosure:
        if self.b == 0:
            return Enclosure.point(self.a)
        scale = abs(self.b)
        root = sqrt_enclosure(self.d, precision / scale)
        return root * self.b + self.a

    def __str__(self) -> str:
        return f"{self.a} + {self.b}*sqrt({self.d})"


def golden_ratio() -> QuadSurd:
    return QuadSurd(Fraction(1, 2), Fraction(1, 2), 5)


def silver_ratio() -> QuadSurd:
    return QuadSurd(Fraction(1), Fraction(1), 2)
