"""Exact arithmetic, interval unions, constructions and their covers."""

from .arith import (DEFAULT_PRECISION, Enclosure, QuadSurd, SqrtParam, as_rational,
                    certainly_le, certainly_lt, compare, exp_enclosure, format_rational,
                    golden_ratio, log_enclosure, lower, parse_rational, sign, silver_ratio,
                    sqrt_enclosure, to_enclosure, upper)
from .construction import (AffineImage, Construction, FiniteUnion, GeometricStack,
                           SubdivisionSystem, point_set)
from .refine import (DEFAULT_DEPTH, DEFAULT_STACK_BLOCKS, CoverApprox, Gap, as_cover,
                     cover_endpoints, negative_part, positive_part, refine)
from .serialize import (SpecError, dump_spec, load_spec, read_union_csv, union_csv,
                        write_union_csv)
from .unions import IntervalUnion, hausdorff_distance, normalize_union

__all__ = [
    "DEFAULT_DEPTH", "DEFAULT_PRECISION", "DEFAULT_STACK_BLOCKS", "AffineImage",
    "Construction", "CoverApprox", "Enclosure", "FiniteUnion", "Gap", "GeometricStack",
    "IntervalUnion", "QuadSurd", "SpecError", "SqrtParam", "SubdivisionSystem",
    "as_cover", "as_rational", "certainly_le", "certainly_lt", "compare",
    "cover_endpoints", "dump_spec", "exp_enclosure", "format_rational", "golden_ratio",
    "hausdorff_distance", "load_spec", "log_enclosure", "lower", "negative_part",
    "normalize_union", "parse_rational", "point_set", "positive_part", "read_union_csv",
    "refine", "sign", "silver_ratio", "sqrt_enclosure", "to_enclosure", "union_csv",
    "upper", "write_union_csv",
]
