import random
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cantorprod.core import normalize_union

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repro")

SEED = 20240611


def random_union(rng: random.Random, n: int, lo=-20, hi=20, den=64):
    """n disjoint intervals with dyadic endpoints in [lo, hi]."""
    pts = sorted(rng.sample(range(lo * den, hi * den), 2 * n))
    return normalize_union((Fraction(pts[2 * i], den), Fraction(pts[2 * i + 1], den))
                           for i in range(n))


@st.composite
def unions(draw, min_size=1, max_size=12, lo=-40, hi=40, positive=False):
    """Disjoint exact unions with distinct small-denominator endpoints."""
    den = draw(st.sampled_from([2, 3, 4, 8]))
    lo = max(lo, 1) if positive else lo
    n = draw(st.integers(min_size, max_size))
    pts = draw(st.lists(st.integers(lo * den, hi * den), min_size=2 * n, max_size=2 * n,
                        unique=True))
    pts.sort()
    return normalize_union((Fraction(pts[2 * i], den), Fraction(pts[2 * i + 1], den))
                           for i in range(n))


def random_system(rng: random.Random, lo, hi, den=60):
    """Single-pattern subdivision system on [lo, hi] with 2 or 3 children."""
    from cantorprod.core import SubdivisionSystem
    n = rng.choice([2, 2, 3])
    gaps = [rng.randint(3, 12) for _ in range(n - 1)]
    total = den - sum(gaps)
    cuts = sorted(rng.sample(range(1, total), n - 1))
    widths = [b - a for a, b in zip([0] + cuts, cuts + [total])]
    pat, x = [], 0
    for i, w in enumerate(widths):
        pat.append((Fraction(x, den), Fraction(x + w, den)))
        x += w + (gaps[i] if i < n - 1 else 0)
    return SubdivisionSystem((Fraction(lo), Fraction(hi)), (tuple(pat),))


def min_cover_thickness(c, depth):
    """Smallest exact cover thickness over depths 1..depth."""
    from cantorprod.core import refine
    from cantorprod.thickness import thickness
    return min(thickness(refine(c, d)).value for d in range(1, depth + 1))


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance lines recorded via ``record_property``."""
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if getattr(rep, "when", None) != "call":
                continue
            lines.extend(v for k, v in rep.user_properties if k == "acceptance")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
