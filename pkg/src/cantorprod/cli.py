"""Command line entry point: ``cantorprod <subcommand> [flags]``.

Every numeric flag is read as an exact rational (``3/2``, ``0.05``, ``7``).
Exit status: 0 success or match, 1 mismatch, 2 usage or input error,
3 indeterminate, 4 computational failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .constructions import (S5_CASES, THEOREMS, CMCantorParams, PaperPairSpec, cm_cantor,
                            middle_alpha, middle_stack, paper_pair)
from .core.arith import format_rational, parse_rational
from .core.refine import refine
from .core.serialize import SpecError, dump_spec, load_spec, union_csv
from .setops import SweepRow, classify_structure, leaf_product_bound, minkowski_sum, product, \
    sum_bound, sweep_csv
from .thickness import InsufficientDepth, classify_gaps, split_decomposition, thickness
from .thresholds import ConditionId, region_csv, region_grid
from .verify import (EXIT_FAILURE, EXIT_MATCH, EXIT_MISMATCH, EXIT_USAGE,
                     SCENARIOS, GapCertificate, _intersection_csv, build_scenario,
                     intersection_check, recheck_certificate, run_scenario)

__all__ = ["main", "build_parser", "UsageError"]


class UsageError(Exception):
    """Bad flag or input; the message names the offending flag."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# flag value parsers


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_rational(text: str) -> Fraction:
    v = _rational(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _count(text: str) -> int:
    v = _rational(text)
    if v.denominator != 1 or v < 0:
        raise argparse.ArgumentTypeError(f"not a non-negative integer: {text!r}")
    return int(v)


def _blocks(text: str) -> int:
    v = _count(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _pair(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b': {text!r}")
    return tuple(_rational(p) for p in parts)


def _depth_range(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'lo:hi': {text!r}")
    lo, hi = (_count(p) for p in parts)
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty depth range: {text!r}")
    return lo, hi


def _grid_range(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected 'lo:hi:step': {text!r}")
    lo, hi, step = (_rational(p) for p in parts)
    if step <= 0 or lo <= 0 or lo > hi:
        raise argparse.ArgumentTypeError(f"need 0 < lo <= hi and step > 0: {text!r}")
    return lo, hi, step


def _params(text: str) -> dict:
    """``M=2,N=3/2,k=3,case=5.1a`` -> dict; ``case`` stays a string."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"expected key=value: {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        if key == "case":
            out[key] = value
        elif key == "k":
            out[key] = _count(value)
        else:
            out[key] = _rational(value)
    return out


# ---------------------------------------------------------------------------
# helpers


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _load(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"--construction: cannot read {path!r}: {exc.strerror}") from exc
    try:
        outputs = load_spec(text)
    except SpecError as exc:
        raise UsageError(f"--construction: {path}: {exc}") from exc
    if not outputs:
        raise UsageError(f"--construction: {path} declares no outputs")
    return outputs


def _one(args) -> object:
    outputs = _load(args.construction)
    if args.name is not None:
        if args.name not in outputs:
            raise UsageError(f"--name: no output {args.name!r} in {args.construction} "
                             f"(have {', '.join(outputs)})")
        return outputs[args.name]
    return next(iter(outputs.values()))


def _two(args) -> tuple:
    outputs = _load(args.construction)
    names = (args.left, args.right)
    for flag, n in zip(("--left", "--right"), names):
        if n not in outputs:
            raise UsageError(f"{flag}: no output {n!r} in {args.construction} "
                             f"(have {', '.join(outputs)})")
    return outputs[names[0]], outputs[names[1]]


def _depths(args) -> tuple:
    if args.sweep is not None:
        return tuple(range(args.sweep[0], args.sweep[1] + 1))
    if args.depth is None:
        raise UsageError("one of --depth or --sweep is required")
    return (args.depth,)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_construct(args) -> int:
    chosen = [f for f, v in (("--theorem", args.theorem), ("--middle-alpha", args.middle_alpha),
                             ("--middle-stack", args.middle_stack), ("--cm", args.cm))
              if v is not None]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --theorem, --middle-alpha, --middle-stack, --cm")
    params = args.params or {}
    if args.theorem is not None:
        if args.theorem not in THEOREMS:
            raise UsageError(f"--theorem: unknown {args.theorem!r}; choose from {', '.join(THEOREMS)}")
        for key in ("M", "N"):
            if key not in params:
                raise UsageError(f"--params: {key}=.. is required for --theorem")
        unknown = set(params) - {"M", "N", "k", "case", "alpha", "epsilon"}
        if unknown:
            raise UsageError(f"--params: unknown keys {', '.join(sorted(unknown))}")
        if args.theorem == "S5_case" and params.get("case") not in S5_CASES:
            raise UsageError(f"--params: case=.. must be one of {', '.join(S5_CASES)}")
        extra = {k: params[k] for k in ("alpha", "epsilon") if k in params}
        try:
            pair = paper_pair(PaperPairSpec(args.theorem, params["M"], params["N"],
                                            params.get("k"), params.get("case"), **extra))
        except ValueError as exc:
            raise UsageError(f"--params: {exc}") from exc
        outputs = {"K": pair.K, "L": pair.L}
    elif args.middle_alpha is not None:
        if not 0 < args.middle_alpha < 1:
            raise UsageError("--middle-alpha: must lie in (0, 1)")
        hull = args.hull or (Fraction(0), Fraction(1))
        if hull[0] >= hull[1]:
            raise UsageError("--hull: need a < b")
        outputs = {"K": middle_alpha(args.middle_alpha, hull)}
    elif args.middle_stack is not None:
        outputs = {"K": middle_stack(args.middle_stack)[0]}
    else:
        try:
            outputs = {"K": cm_cantor(CMCantorParams(*args.cm))}
        except ValueError as exc:
            raise UsageError(f"--cm: {exc}") from exc
    _write(dump_spec(outputs), args.output)
    return EXIT_MATCH


def _cmd_refine(args) -> int:
    cv = refine(_one(args), args.depth, args.stack_blocks)
    _write(union_csv(cv.intervals), args.output)
    return EXIT_MATCH


def _cmd_thickness(args) -> int:
    cv = refine(_one(args), args.depth, args.stack_blocks)
    tv = thickness(cv)
    print(tv)
    if args.verbose and tv.pair is not None:
        print(f"minimizing pair: {tv.pair[0]} {tv.pair[1]}")
    return EXIT_MATCH


def _cmd_classify_gaps(args) -> int:
    cv = refine(_one(args), args.depth, args.stack_blocks)
    lines = ["gap_left,gap_right,ratio,tag"]
    for g, c in classify_gaps(cv, args.C):
        ratio = format_rational(c.ratio) if isinstance(c.ratio, Fraction) else str(c.ratio)
        lines.append(f"{g.left},{g.right},{ratio},{c.tag.value}")
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_MATCH


def _cmd_split(args) -> int:
    cv = refine(_one(args), args.depth, args.stack_blocks)
    sd = split_decomposition(cv, args.C)
    lines = [f"finite: {int(sd.finite)}", f"reaches_zero: {int(sd.reaches_zero)}"]
    for i, g in enumerate(sd.split_gaps):
        lines.append(f"gap {i}: {g}")
    for i, s in enumerate(sd.split_sets):
        hull = "empty" if s.intervals.is_empty else f"[{s.intervals.left}, {s.intervals.right}]"
        lines.append(f"set {i}: {len(s.intervals)} intervals, hull {hull}")
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_MATCH


def _cmd_combine(args, op: str) -> int:
    depths = _depths(args)
    K, L = _two(args)
    if len(depths) == 1:
        ck = refine(K, depths[0], args.stack_blocks).intervals
        cl = refine(L, depths[0], args.stack_blocks).intervals
        U = product(ck, cl) if op == "product" else minkowski_sum(ck, cl)
        _write(union_csv(U), args.output)
        return EXIT_MATCH
    rows = []
    for d in depths:
        ck = refine(K, d, args.stack_blocks).intervals
        cl = refine(L, d, args.stack_blocks).intervals
        if op == "product":
            rows.append(SweepRow(d, product(ck, cl), leaf_product_bound(ck, cl)))
        else:
            rows.append(SweepRow(d, minkowski_sum(ck, cl), sum_bound(ck, cl)))
    verdict = classify_structure(rows, args.ratio_hint)
    _write(sweep_csv(rows), args.output)
    print(f"verdict: {verdict.label()}", file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return EXIT_MATCH


def _cmd_verify(args) -> int:
    if args.list:
        for name in sorted(SCENARIOS):
            print(f"{name}: {SCENARIOS[name][1]}")
        return EXIT_MATCH
    if args.recheck is not None:
        try:
            with open(args.recheck, encoding="utf-8") as fh:
                cert = GapCertificate.from_text(fh.read())
        except OSError as exc:
            raise UsageError(f"--recheck: cannot read {args.recheck!r}: {exc.strerror}") from exc
        except (ValueError, KeyError) as exc:
            raise UsageError(f"--recheck: malformed certificate: {exc}") from exc
        ok, reason = recheck_certificate(cert)
        print(f"certificate {'valid' if ok else 'INVALID'}: {reason}")
        return EXIT_MATCH if ok else EXIT_MISMATCH
    if args.scenario is None:
        raise UsageError("--scenario is required (or --list / --recheck)")
    if args.scenario not in SCENARIOS:
        raise UsageError(f"--scenario: unknown {args.scenario!r}; "
                         f"choose from {', '.join(sorted(SCENARIOS))}")
    try:
        s = build_scenario(args.scenario, args.params, args.max_depth, args.min_depth,
                           args.stack_blocks)
    except ValueError as exc:
        raise UsageError(f"--params: {exc}") from exc
    rep = run_scenario(s)
    print(rep.text(), end="")
    if args.csv is not None:
        _write(rep.sweep_csv(), args.csv)
    if args.certificate is not None and rep.certificate is not None:
        _write(rep.certificate.to_text(), args.certificate)
    return rep.exit_code


def _cmd_region_map(args) -> int:
    try:
        cond = ConditionId.parse(args.condition)
    except ValueError as exc:
        raise UsageError(f"--condition: {exc}") from exc
    m_lo, m_hi, step = args.range
    if args.n_range is not None:
        n_lo, n_hi, n_step = args.n_range
        if n_step != step:
            raise UsageError("--n-range: step must equal the --range step")
    else:
        n_lo, n_hi = m_lo, m_hi
    rows = region_grid(cond, (m_lo, m_hi), (n_lo, n_hi), step)
    _write(region_csv(rows), args.output)
    return EXIT_MATCH


def _cmd_intersect(args) -> int:
    depths = _depths(args)
    K, L = _two(args)
    rep = intersection_check(K, L, depths, args.stack_blocks)
    _write(_intersection_csv(rep.rows), args.output)
    ratios = ", ".join("-" if r is None else format_rational(r) for r in rep.diameter_ratios)
    out = sys.stderr if args.output in (None, "-") else sys.stdout
    print(f"nonempty: {int(rep.nonempty)}", file=out)
    if ratios:
        print(f"diameter ratios: {ratios}", file=out)
    return EXIT_MATCH


# ---------------------------------------------------------------------------
# parser


def _construction_flags(p, depth_required=True, pair=False, blocks=12):
    p.add_argument("--construction", required=True, metavar="FILE",
                   help="spec file written by 'construct'")
    if pair:
        p.add_argument("--left", default="K", help="output name of the left operand (default K)")
        p.add_argument("--right", default="L", help="output name of the right operand (default L)")
    else:
        p.add_argument("--name", help="output name inside the construction file (default: the first)")
    p.add_argument("--depth", type=_count, required=depth_required, help="refinement depth")
    p.add_argument("--stack-blocks", type=_blocks, default=blocks,
                   help="explicit blocks kept per infinite stack "
                        f"(default {blocks or 'depth + 1'})")
    p.add_argument("-o", "--output", metavar="FILE", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cantorprod", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("construct", help="write a construction spec file")
    p.add_argument("--theorem", help=f"counterexample pair: {', '.join(THEOREMS)}")
    p.add_argument("--params", type=_params, help="M=..,N=..[,k=..][,case=..][,alpha=..]")
    p.add_argument("--middle-alpha", type=_rational, metavar="A",
                   help="middle-A Cantor set on --hull")
    p.add_argument("--hull", type=_pair, metavar="a,b", help="hull for --middle-alpha (default 0,1)")
    p.add_argument("--middle-stack", type=_positive_rational, metavar="M",
                   help="0+ stack of middle-1/(1+2M) blocks")
    p.add_argument("--cm", type=_pair, metavar="C,M", help="(C,M)-Cantor set")
    p.add_argument("-o", "--output", metavar="FILE", help="output file (default stdout)")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("refine", help="depth-d outer cover as CSV")
    _construction_flags(p)
    p.set_defaults(func=_cmd_refine)

    p = sub.add_parser("thickness", help="exact thickness of a depth-d cover")
    _construction_flags(p)
    p.add_argument("-v", "--verbose", action="store_true", help="also print the minimizing pair")
    p.set_defaults(func=_cmd_thickness)

    p = sub.add_parser("classify-gaps", help="C-nice / C-bad tags of positive gaps")
    _construction_flags(p)
    p.add_argument("--C", type=_positive_rational, required=True, help="niceness constant")
    p.set_defaults(func=_cmd_classify_gaps)

    p = sub.add_parser("split", help="split decomposition at C-bad gaps")
    _construction_flags(p)
    p.add_argument("--C", type=_positive_rational, required=True, help="niceness constant")
    p.set_defaults(func=_cmd_split)

    for name, helptext in (("sum", "Minkowski sum K + L"), ("product", "product set K . L")):
        p = sub.add_parser(name, help=helptext)
        _construction_flags(p, depth_required=False, pair=True)
        p.add_argument("--sweep", type=_depth_range, metavar="LO:HI",
                       help="sweep depths and print the sweep table and verdict")
        p.add_argument("--ratio-hint", type=_positive_rational,
                       help="scale ratio tested for a geometric tail at 0")
        p.set_defaults(func=lambda a, op=name: _cmd_combine(a, op))

    p = sub.add_parser("verify", help="run a named scenario")
    p.add_argument("--scenario", help="scenario name (see --list)")
    p.add_argument("--params", type=_params, help="M=..,N=..[,k=..][,alpha=..]")
    p.add_argument("--max-depth", type=_count, help="last depth of the sweep")
    p.add_argument("--min-depth", type=_count, help="first depth of the sweep")
    p.add_argument("--stack-blocks", type=_blocks, default=12,
                   help="explicit blocks kept per infinite stack (default 12)")
    p.add_argument("--csv", metavar="FILE", help="write the sweep table as CSV")
    p.add_argument("--certificate", metavar="FILE", help="write the gap certificate")
    p.add_argument("--recheck", metavar="FILE", help="re-check a saved gap certificate")
    p.add_argument("--list", action="store_true", help="list scenarios")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("region-map", help="CSV grid of a threshold condition")
    p.add_argument("--condition", required=True,
                   help=f"one of {', '.join(c.value for c in ConditionId)}")
    p.add_argument("--range", type=_grid_range, required=True, metavar="LO:HI:STEP",
                   help="M range (also N unless --n-range)")
    p.add_argument("--n-range", type=_grid_range, metavar="LO:HI:STEP", help="N range")
    p.add_argument("-o", "--output", metavar="FILE", help="output file (default stdout)")
    p.set_defaults(func=_cmd_region_map)

    p = sub.add_parser("intersect", help="intersection of covers per depth")
    _construction_flags(p, depth_required=False, pair=True, blocks=None)
    p.add_argument("--sweep", type=_depth_range, metavar="LO:HI", help="depth range")
    p.set_defaults(func=_cmd_intersect)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, InsufficientDepth, RecursionError) as exc:
        print(f"computational failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        sys.stdout = open(os.devnull, "w")
        return EXIT_MATCH


if __name__ == "__main__":
    sys.exit(main())
