"""Generators for the explicit Cantor sets used in the product experiments.

Every builder returns plain :mod:`cantorprod.core` constructions, so the
results can be refined, serialized and combined like any other set.  Where
a closed-form thickness is known it is attached or exposed next to the
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core.arith import (DEFAULT_PRECISION, Enclosure, SqrtParam, as_rational,
                         log_enclosure, sqrt_enclosure)
from .core.construction import (AffineImage, Construction, FiniteUnion, GeometricStack,
                                SubdivisionSystem)
from .thresholds import ConditionId, require

THICK_ALPHA = Fraction(1, 1000)
THICK_RATIO = Fraction(499, 1000)
DEFAULT_EPSILON = Fraction(1, 100)


def middle_alpha(alpha, hull=(0, 1)) -> SubdivisionSystem:
    """Middle-alpha Cantor set on ``hull``; thickness (1 - alpha) / (2 alpha)."""
    alpha = as_rational(alpha)
    if not 0 < alpha < 1:
        raise ValueError(f"alpha={alpha} outside (0, 1)")
    side = (1 - alpha) / 2
    return SubdivisionSystem(tuple(hull), (((Fraction(0), side), (1 - side, Fraction(1))),),
                             tau=side / alpha)


def middle_for_thickness(tau) -> Fraction:
    """The alpha whose middle-alpha set has thickness tau."""
    tau = as_rational(tau)
    return 1 / (1 + 2 * tau)


def geometric_stack(block: Construction, ratio, blocks: Optional[int] = None,
                    includes_zero: bool = True, negative_scale=None) -> GeometricStack:
    return GeometricStack(block, as_rational(ratio), blocks, includes_zero, negative_scale)


def thick_stack(extent, *, reaches_zero: bool = True, inner=None,
                alpha=THICK_ALPHA, ratio=THICK_RATIO) -> GeometricStack:
    """Very thick set in [0, extent] built from blocks on [R/2, R].

    With ``reaches_zero`` the blocks accumulate at 0; otherwise the stack is
    cut after the first block whose left end is at most ``inner`` (default
    ``extent / 1000``), leaving a small hole next to 0.
    """
    extent = as_rational(extent)
    block = middle_alpha(alpha, (extent / 2, extent))
    if reaches_zero:
        return GeometricStack(block, ratio)
    inner = extent / 1000 if inner is None else as_rational(inner)
    n, left = 1, extent / 2
    while left > inner:
        left *= ratio
        n += 1
    return GeometricStack(block, ratio, n, includes_zero=False)


def thick_two_sided(positive_extent, negative_extent, *, positive_reaches_zero: bool = True,
                    negative_reaches_zero: bool = True, inner=None) -> Construction:
    """Thick set on [-negative_extent, positive_extent] around 0.

    Each side either accumulates at 0 or stops short of it; this realizes the
    four origin classes (both reach 0: a 0-set; neither: 0 excluded; one side
    only: 0 is a one-sided accumulation point).
    """
    pos_e, neg_e = as_rational(positive_extent), as_rational(negative_extent)
    if positive_reaches_zero == negative_reaches_zero:
        pos = thick_stack(pos_e, reaches_zero=positive_reaches_zero, inner=inner)
        return GeometricStack(pos.block, pos.ratio, pos.blocks, pos.includes_zero, neg_e / pos_e)
    pos = thick_stack(pos_e, reaches_zero=positive_reaches_zero, inner=inner)
    neg = thick_stack(neg_e, reaches_zero=negative_reaches_zero, inner=inner)
    return FiniteUnion((AffineImage(Fraction(-1), Fraction(0), neg), pos))


def reflect(c: Construction) -> AffineImage:
    return AffineImage(Fraction(-1), Fraction(0), c)


@dataclass(frozen=True)
class CMCantorParams:
    """Parameters of a (C, M)-set: blocks K0 on [(1+C)/(1+C+M), 1] stacked with
    ratio C/(1+C+M) and mirrored with scale sqrt(C/(1+C+M))."""

    C: Fraction
    M: Fraction
    block: Optional[Construction] = None
    block_tau: Optional[Fraction] = None

    def __post_init__(self):
        C, M = as_rational(self.C), as_rational(self.M)
        if C <= 0 or M <= 0:
            raise ValueError("C and M must be positive")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "M", M)
        hull = ((1 + C) / (1 + C + M), Fraction(1))
        block = self.block
        if block is None:
            block = middle_alpha(THICK_ALPHA, hull)
        if tuple(block.bounds()) != hull:
            raise ValueError(f"block hull must be {hull}")
        tau = self.block_tau
        if tau is None:
            tau = getattr(block, "tau", None)
        if tau is None:
            raise ValueError("block thickness unknown; pass block_tau")
        tau = as_rational(tau)
        # tau(K0) > max{1, M, C + sqrt(C(1+C+M))}
        root = C * (1 + C + M)
        if not (tau > 1 and tau > M and tau > C and (tau - C) ** 2 > root):
            raise ValueError(f"block thickness {tau} too small for a ({C}, {M})-set")
        object.__setattr__(self, "block", block)
        object.__setattr__(self, "block_tau", tau)

    @property
    def ratio(self) -> Fraction:
        return self.C / (1 + self.C + self.M)

    @property
    def sigma(self) -> SqrtParam:
        return SqrtParam(self.ratio, DEFAULT_PRECISION)

    def d(self, precision=DEFAULT_PRECISION) -> Enclosure:
        """Log-period log(1 + (1+M)/C)."""
        return log_enclosure(1 + (1 + self.M) / self.C, precision)


def cm_cantor(p: CMCantorParams) -> GeometricStack:
    """The (C, M)-set as a single stack node (its 0 is the accumulation point)."""
    return GeometricStack(p.block, p.ratio, None, True, p.sigma)


def cm_thickness(C, M, precision=DEFAULT_PRECISION) -> Enclosure:
    """M when C >= M^2/(3M+1), else C + sqrt(C(1+C+M)); branch decided exactly."""
    C, M = as_rational(C), as_rational(M)
    if C <= 0 or M <= 0:
        raise ValueError("C and M must be positive")
    if C >= M * M / (3 * M + 1):
        return Enclosure.point(M)
    return sqrt_enclosure(C * (1 + C + M), precision) + C


@dataclass(frozen=True)
class PaperPairSpec:
    """Which pair to build.

    ``theorem`` is one of ``T13_countable``, ``T13_kComponents``, ``T14_mixed``,
    ``T15_twoComponents``, ``T16_countable``, ``Williams_intersection`` or
    ``S5_case`` (with ``case`` in :data:`S5_CASES`).
    """

    theorem: str
    M: Fraction
    N: Fraction
    k: Optional[int] = None
    case: Optional[str] = None
    alpha: Fraction = THICK_ALPHA
    epsilon: Fraction = DEFAULT_EPSILON

    def __post_init__(self):
        object.__setattr__(self, "M", as_rational(self.M))
        object.__setattr__(self, "N", as_rational(self.N))
        object.__setattr__(self, "alpha", as_rational(self.alpha))
        object.__setattr__(self, "epsilon", as_rational(self.epsilon))


@dataclass(frozen=True)
class PaperPair:
    """K, L and the exact constants used to build them."""

    K: Construction
    L: Construction
    spec: PaperPairSpec
    constants: dict = field(default_factory=dict, compare=False)
    tau_K: object = None
    tau_L: object = None
    expected: str = ""
    ratio_hint: Optional[Fraction] = None

    def __iter__(self):
        return iter((self.K, self.L))


S5_CASES = {
    "5.1a": "0+ set times a 0+- set: k intervals",
    "5.1b": "0+ set times a 0x set: k intervals",
    "5.2a": "0 set times a 0+- set: two intervals",
    "5.2b": "0 set times a 0x set: two intervals",
    "5.2c": "0+- set times a 0x set: two intervals",
    "5.2d": "two 0+- sets: two intervals",
    "5.3": "two 0x sets: three intervals",
    "5.4": "min K > 0 times a 0+ set: {0} and countably many intervals",
}

THEOREMS = ("T13_countable", "T13_kComponents", "T14_mixed", "T15_twoComponents",
            "T16_countable", "Williams_intersection", "S5_case")


def middle_stack(M) -> tuple:
    """0+ set {0} U stack of middle-1/(1+2M) blocks; thickness M."""
    a = middle_for_thickness(M)
    block = middle_alpha(a, ((1 + M) / (1 + 2 * M), Fraction(1)))
    rho = M / (1 + 2 * M)
    return GeometricStack(block, rho), rho


def _ratio_stack(C, N, alpha, blocks=None, includes_zero=True) -> tuple:
    """Thick blocks on [(1+C)/(1+C+N), 1] stacked with ratio C/(1+C+N)."""
    block = middle_alpha(alpha, ((1 + C) / (1 + C + N), Fraction(1)))
    rho = C / (1 + C + N)
    return GeometricStack(block, rho, blocks, includes_zero), rho


def _t13(spec: PaperPairSpec, k: Optional[int], near_zero: Optional[str] = None) -> PaperPair:
    """Middle-alpha stack K (thickness M) against a ratio stack L (thickness N).

    ``near_zero`` replaces the part of L below rho^(k-1) by a thick two-sided
    piece: ``None`` keeps a 0+ set, ``"0+-"`` / ``"0x"`` / ``"0"`` select
    the origin class of L.
    """
    M, N, alpha = spec.M, spec.N, spec.alpha
    C = M * (1 + N) / (1 + M)
    K, rho_k = middle_stack(M)
    const = {"C": C, "rho": rho_k}
    if k is None:
        L, rho = _ratio_stack(C, N, alpha)
        if near_zero == "0":
            L = FiniteUnion((reflect(thick_stack(10 * Fraction(1))), L))
        return PaperPair(K, L, spec, const, M, N, "zero-plus-geometric-tail", rho_k)
    if k < 2:
        raise ValueError("k must be at least 2")
    blocks, rho = _ratio_stack(C, N, alpha, blocks=k - 1, includes_zero=False)
    top = rho ** (k - 1)
    if near_zero is None:
        small = middle_alpha(alpha, (Fraction(0), top))
    elif near_zero == "0":
        small = thick_two_sided(top, 10)
    elif near_zero == "0+-":
        small = thick_two_sided(top, 1, negative_reaches_zero=False, inner=top / 1000)
    elif near_zero == "0x":
        small = thick_two_sided(top, 1, positive_reaches_zero=False,
                                negative_reaches_zero=False, inner=top / 1000)
    else:
        raise ValueError(f"unknown origin class {near_zero!r}")
    L = FiniteUnion((small, blocks))
    const["k"] = k
    return PaperPair(K, L, spec, const, M, N, f"components({k})")


def t15_constants(M, N) -> tuple:
    M, N = as_rational(M), as_rational(N)
    den = 3 * M * N + 2 * M + 2 * N + 1
    return M * N * (M + 1) / den, M * N * (N + 1) / den


def _two_block(M, C1, alpha, near_zero=("0", "0"), inner=None) -> FiniteUnion:
    """Thick piece on [C1 - M, C1] around 0 plus a thick block on [1+C1, 1+C1+M]."""
    pos_zero = near_zero[0] == "0"
    neg_zero = near_zero[1] == "0"
    low = thick_two_sided(C1, M - C1, positive_reaches_zero=pos_zero,
                          negative_reaches_zero=neg_zero, inner=inner)
    high = middle_alpha(alpha, (1 + C1, 1 + C1 + M))
    return FiniteUnion((low, high))


def two_block_pair(M, N, alpha=THICK_ALPHA, kinds=(("0", "0"), ("0", "0"))) -> tuple:
    """The two-block 0-set pair with the derived constants, without hypothesis checks."""
    C1, C2 = t15_constants(M, N)
    if not (0 < C1 < M and 0 < C2 < N):
        raise ValueError("two-block constants must satisfy 0 < C1 < M, 0 < C2 < N")
    K = _two_block(as_rational(M), C1, alpha, kinds[0], C1 / 1000)
    L = _two_block(as_rational(N), C2, alpha, kinds[1], C2 / 1000)
    return K, L, {"C1": C1, "C2": C2}


_ORIGIN = {"0": ("0", "0"), "0+-": ("0", "x"), "0x": ("x", "x")}


def _t15(spec: PaperPairSpec, kinds=("0", "0"), expected="components(2)") -> PaperPair:
    K, L, const = two_block_pair(spec.M, spec.N, spec.alpha, (_ORIGIN[kinds[0]], _ORIGIN[kinds[1]]))
    return PaperPair(K, L, spec, const, spec.M, spec.N, expected)


def t16_constants(M, N) -> dict:
    """Constants for the countable 0-set pair; requires M >= N."""
    M, N = as_rational(M), as_rational(N)
    if (2 * M + 1) ** 2 > N * M ** 3:
        C1 = M * M / (1 + 3 * M)
        C2 = M * M * (1 + N) / ((1 + M) * (1 + 3 * M))
        return {"branch": 1, "C1": C1, "M1": M, "C2": C2, "N1": N}
    C1 = M * N / (3 * N + 1)
    C2 = N * N / (3 * N + 1)
    return {"branch": 2, "C1": C1, "M1": M + M / N - 1, "C2": C2, "N1": N}


def _t16(spec: PaperPairSpec) -> PaperPair:
    M, N = spec.M, spec.N
    require(ConditionId.COND_INTERSECTION, M, N)
    swap = M < N
    big, small = (N, M) if swap else (M, N)
    const = t16_constants(big, small)
    pK = CMCantorParams(const["C1"], const["M1"], middle_alpha(spec.alpha, (
        (1 + const["C1"]) / (1 + const["C1"] + const["M1"]), Fraction(1))))
    pL = CMCantorParams(const["C2"], const["N1"], middle_alpha(spec.alpha, (
        (1 + const["C2"]) / (1 + const["C2"] + const["N1"]), Fraction(1))))
    K, L = cm_cantor(pK), cm_cantor(pL)
    tk, tl = cm_thickness(pK.C, pK.M), cm_thickness(pL.C, pL.M)
    const.update(rho=pK.ratio, swapped=swap)
    if swap:
        K, L, tk, tl = L, K, tl, tk
    return PaperPair(K, L, spec, const, tk, tl, "zero-plus-geometric-tail", pK.ratio)


def _williams(spec: PaperPairSpec) -> PaperPair:
    """(C,M)-set K and the reflection of the matching (C,N)-set: K meets -L only at 0."""
    pair = _t16(spec)
    const = dict(pair.constants)
    # blocks of K and of -L alternate in log scale iff each block is narrower than half a period
    for c, m in ((const["C1"], const["M1"]), (const["C2"], const["N1"])):
        w = 1 + m / (1 + c)
        if not w * w < 1 + (1 + m) / c:
            raise ValueError("blocks too wide for a one-point intersection")
    return PaperPair(pair.K, reflect(pair.L), spec, const, pair.tau_K, pair.tau_L,
                     "single-point", pair.ratio_hint)


def _s54(spec: PaperPairSpec) -> PaperPair:
    """K = two thick blocks inside [1, 1+eps] with thickness M; L middle-1/(1+2N) on [0, 1]."""
    M, N, eps, alpha = spec.M, spec.N, spec.epsilon, spec.alpha
    if not 0 < eps:
        raise ValueError("epsilon must be positive")
    unit = eps / (2 * M + 1)
    K = FiniteUnion((middle_alpha(alpha, (Fraction(1), 1 + M * unit)),
                     middle_alpha(alpha, (1 + (M + 1) * unit, 1 + eps))))
    L = middle_alpha(middle_for_thickness(N), (Fraction(0), Fraction(1)))
    rho = N / (1 + 2 * N)
    return PaperPair(K, L, spec, {"epsilon": eps, "rho": rho}, M, N,
                     "zero-plus-geometric-tail", rho)


def paper_pair(spec: PaperPairSpec) -> PaperPair:
    """Build the pair named by ``spec`` after checking its hypothesis."""
    M, N, th = spec.M, spec.N, spec.theorem
    if M <= 0 or N <= 0:
        raise ValueError("M and N must be positive")
    if th == "T13_countable":
        require(ConditionId.COND_THM0, M, N)
        if M < N:
            swapped = paper_pair(PaperPairSpec(th, N, M, alpha=spec.alpha))
            return PaperPair(swapped.L, swapped.K, spec, swapped.constants, M, N,
                             swapped.expected, swapped.ratio_hint)
        return _t13(spec, None)
    if th == "T13_kComponents":
        require(ConditionId.COND_THM0, M, N)
        if spec.k is None:
            raise ValueError("T13_kComponents needs k")
        if M < N:
            swapped = paper_pair(PaperPairSpec(th, N, M, k=spec.k, alpha=spec.alpha))
            return PaperPair(swapped.L, swapped.K, spec, swapped.constants, M, N,
                             swapped.expected)
        return _t13(spec, spec.k)
    if th == "T14_mixed":
        require(ConditionId.COND_THM2, M, N)
        return _t13(spec, spec.k, near_zero="0")
    if th == "T15_twoComponents":
        require(ConditionId.COND_THM3, M, N)
        return _t15(spec)
    if th == "T16_countable":
        return _t16(spec)
    if th == "Williams_intersection":
        return _williams(spec)
    if th == "S5_case":
        case = spec.case
        if case not in S5_CASES:
            raise ValueError(f"unknown case {case!r}; choose from {', '.join(S5_CASES)}")
        if case in ("5.1a", "5.1b"):
            require(ConditionId.COND_THM2, M, N)
            k = spec.k if spec.k is not None else 2
            return _t13(spec, k, near_zero="0+-" if case == "5.1a" else "0x")
        if case.startswith("5.2"):
            require(ConditionId.COND_THM3, M, N)
            kinds = {"5.2a": ("0", "0+-"), "5.2b": ("0", "0x"),
                     "5.2c": ("0+-", "0x"), "5.2d": ("0+-", "0+-")}[case]
            return _t15(spec, kinds)
        if case == "5.3":
            require(ConditionId.COND_THM3, M, N)
            return _t15(spec, ("0x", "0x"), expected="components(3)")
        return _s54(spec)
    raise ValueError(f"unknown theorem id {th!r}; choose from {', '.join(THEOREMS)}")
