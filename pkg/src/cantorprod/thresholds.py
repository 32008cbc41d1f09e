"""Exact predicates on thickness pairs (M, N) and the region mapper.

Each condition is a boolean combination of polynomial sign tests evaluated
with three-valued logic: exact for rationals and quadratic surds, and
``INDETERMINATE`` when an enclosure straddles a boundary.
"""

from __future__ import annotations

import csv
import io
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional

from .core.arith import Enclosure, QuadSurd, as_rational, sign, sqrt_enclosure


class ConditionId(Enum):
    COND465 = "cond465"             # product of two 0+ sets is an interval
    COND3654 = "cond3654"           # 0+ times 0 set is an interval
    COND46578 = "cond46578"         # product of two 0 sets is an interval
    COND_THM0 = "condthm0"          # countable / k-component region, 0+ x 0+
    COND_THM2 = "condthm2"          # countable / k-component region, 0+ x 0
    COND_THM3 = "condthm3"          # two-component region, 0 x 0
    COND_INTERSECTION = "condintersection"  # countable region for two 0 sets

    @classmethod
    def parse(cls, text: str) -> "ConditionId":
        key = text.strip().lower().replace("_", "").replace("-", "")
        for c in cls:
            if c.value == key:
                return c
        raise ValueError(f"unknown condition {text!r}; "
                         f"choose from {', '.join(c.value for c in cls)}")


class Verdict(Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INDETERMINATE = "indeterminate"


def _tv(s: Optional[int], strict: bool) -> Optional[bool]:
    """Truth of 'value > 0' (strict) or 'value >= 0' from its sign."""
    if s is None:
        return None
    return s > 0 if strict else s >= 0


def _and(a: Optional[bool], b: Optional[bool]) -> Optional[bool]:
    if a is False or b is False:
        return False
    if a is None or b is None:
        return None
    return True


def _or(a: Optional[bool], b: Optional[bool]) -> Optional[bool]:
    if a is True or b is True:
        return True
    if a is None or b is None:
        return None
    return False


def _not(a: Optional[bool]) -> Optional[bool]:
    return None if a is None else not a


# Atomic tests, written with denominators cleared (M, N > 0).

def _l_ge_bound(M, N) -> Optional[bool]:
    """N >= (2M + 1) / M^2."""
    return _tv(sign(N * M * M - (2 * M + 1)), strict=False)


def _cond_46578(M, N) -> Optional[bool]:
    """2(M + 1)(N + 1) <= (MN - 1)^2."""
    x = M * N - 1
    return _tv(sign(x * x - 2 * (M + 1) * (N + 1)), strict=False)


def _cond_intersection_ordered(M, N) -> Optional[bool]:
    """M >= N assumed: M < (N^2 + 3N + 1)/N^2  or  N < (2M + 1)^2 / M^3."""
    first = _tv(sign(N * N + 3 * N + 1 - M * N * N), strict=True)
    second = _tv(sign((2 * M + 1) * (2 * M + 1) - N * M * M * M), strict=True)
    return _or(first, second)


def _cond_intersection(M, N) -> Optional[bool]:
    order = sign(M - N)
    if order is None:
        a = _cond_intersection_ordered(M, N)
        b = _cond_intersection_ordered(N, M)
        return a if a == b else None
    if order >= 0:
        return _cond_intersection_ordered(M, N)
    return _cond_intersection_ordered(N, M)


_RULES: dict = {
    ConditionId.COND465: lambda M, N: _or(_l_ge_bound(M, N), _l_ge_bound(N, M)),
    ConditionId.COND3654: lambda M, N: _l_ge_bound(M, N),
    ConditionId.COND46578: _cond_46578,
    ConditionId.COND_THM0: lambda M, N: _and(_not(_l_ge_bound(M, N)), _not(_l_ge_bound(N, M))),
    ConditionId.COND_THM2: lambda M, N: _not(_l_ge_bound(M, N)),
    ConditionId.COND_THM3: lambda M, N: _not(_cond_46578(M, N)),
    ConditionId.COND_INTERSECTION: _cond_intersection,
}


def _coerce(x):
    if isinstance(x, (QuadSurd, Enclosure)):
        return x
    return as_rational(x)


def evaluate(cond: ConditionId, M, N) -> Verdict:
    """Three-valued verdict of ``cond`` at (M, N)."""
    if isinstance(cond, str):
        cond = ConditionId.parse(cond)
    M, N = _coerce(M), _coerce(N)
    if sign(M) != 1 or sign(N) != 1:
        raise ValueError("thickness parameters must be positive")
    t = _RULES[cond](M, N)
    if t is None:
        return Verdict.INDETERMINATE
    return Verdict.HOLDS if t else Verdict.FAILS


def holds(cond: ConditionId, M, N) -> bool:
    return evaluate(cond, M, N) is Verdict.HOLDS


def frange(lo: Fraction, hi: Fraction, step: Fraction) -> Iterator[Fraction]:
    """lo, lo + step, ... up to and including hi (exact)."""
    if step <= 0:
        raise ValueError("step must be positive")
    if lo > hi:
        raise ValueError("empty range")
    n = 0
    while lo + n * step <= hi:
        yield lo + n * step
        n += 1


def region_grid(cond: ConditionId, m_range: tuple, n_range: tuple, step) -> list:
    """Rows (M, N, verdict), M-major, over an exact rational grid."""
    step = as_rational(step)
    ms = list(frange(as_rational(m_range[0]), as_rational(m_range[1]), step))
    ns = list(frange(as_rational(n_range[0]), as_rational(n_range[1]), step))
    if any(x <= 0 for x in ms + ns):
        raise ValueError("ranges must be positive")
    return [(M, N, evaluate(cond, M, N)) for M in ms for N in ns]


def region_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["M_num", "M_den", "N_num", "N_den", "verdict"])
    for M, N, v in rows:
        w.writerow([M.numerator, M.denominator, N.numerator, N.denominator, v.value])
    return buf.getvalue()


def bisect_boundary(cond: ConditionId, M, lo, hi, width=Fraction(1, 2**40)) -> Enclosure:
    """Enclose the N at which ``cond`` flips along the vertical line at M.

    ``lo`` and ``hi`` must carry different (decided) verdicts.
    """
    M, lo, hi = as_rational(M), as_rational(lo), as_rational(hi)
    v_lo, v_hi = evaluate(cond, M, lo), evaluate(cond, M, hi)
    if Verdict.INDETERMINATE in (v_lo, v_hi) or v_lo == v_hi:
        raise ValueError("bisection needs a sign change between lo and hi")
    while hi - lo > width:
        mid = (lo + hi) / 2
        if evaluate(cond, M, mid) == v_lo:
            lo = mid
        else:
            hi = mid
    return Enclosure(lo, hi)


def boundary_closed_form(cond: ConditionId, M, precision=Fraction(1, 2**48)) -> Enclosure:
    """Closed-form boundary N(M) for the one-parameter boundaries."""
    M = as_rational(M)
    if cond in (ConditionId.COND3654, ConditionId.COND_THM2):
        return Enclosure.point((2 * M + 1) / (M * M))
    if cond in (ConditionId.COND46578, ConditionId.COND_THM3):
        r = sqrt_enclosure(2 * M + 1, precision)
        return (r * (M + 1) + (2 * M + 1)) / (M * M)
    raise ValueError(f"no closed-form boundary for {cond.value}")


CONDITION_FORMULAS: dict = {
    ConditionId.COND465: "N >= (2M+1)/M^2 or M >= (2N+1)/N^2",
    ConditionId.COND3654: "N >= (2M+1)/M^2",
    ConditionId.COND46578: "2(M+1)(N+1) <= (MN-1)^2",
    ConditionId.COND_THM0: "N < (2M+1)/M^2 and M < (2N+1)/N^2",
    ConditionId.COND_THM2: "N < (2M+1)/M^2",
    ConditionId.COND_THM3: "2(M+1)(N+1) > (MN-1)^2",
    ConditionId.COND_INTERSECTION: "with M >= N: M < (N^2+3N+1)/N^2 or N < (2M+1)^2/M^3",
}


def require(cond: ConditionId, M, N) -> None:
    """Raise ValueError naming the inequality unless ``cond`` holds."""
    v = evaluate(cond, M, N)
    if v is not Verdict.HOLDS:
        raise ValueError(f"hypothesis {CONDITION_FORMULAS[cond]} {v.value} "
                         f"at M={M}, N={N}")
