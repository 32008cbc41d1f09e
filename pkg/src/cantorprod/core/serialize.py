"""Text formats: the construction spec file and union CSV files.

Spec file grammar (one statement per line, ``#`` starts a comment)::

    version=1
    node <id> subdivision hull=<a>,<b> levels=<u>,<v>;<u>,<v>[|...] [tau=<r>]
    node <id> stack block=<id> ratio=<r> blocks=<n|inf> zero=<0|1> [negscale=<s>]
    node <id> affine scale=<s> shift=<r> of=<id>
    node <id> union of=<id>,<id>[,...]
    output <name> <id>

Rationals are written ``p/q``.  A scale ``<s>`` is either a rational or
``sqrt(<radicand>;<precision>)``.  Nodes must be defined before use.  A point
``{a}`` is a subdivision with hull ``a,a`` and an empty ``levels=``.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from typing import Dict, Iterable, TextIO

from .arith import SqrtParam, format_rational, lower, parse_rational, upper
from .construction import (AffineImage, Construction, FiniteUnion,
                           GeometricStack, SubdivisionSystem)
from .unions import IntervalUnion, normalize_union

SPEC_VERSION = 1
CSV_HEADER = ["left_num", "left_den", "right_num", "right_den"]


class SpecError(ValueError):
    pass


def _fmt_scale(s) -> str:
    if isinstance(s, SqrtParam):
        return f"sqrt({format_rational(s.radicand)};{format_rational(s.precision)})"
    return format_rational(s)


def _parse_scale(text: str):
    if text.startswith("sqrt(") and text.endswith(")"):
        body = text[5:-1]
        if ";" not in body:
            raise SpecError(f"sqrt scale needs 'radicand;precision': {text!r}")
        r, p = body.split(";", 1)
        return SqrtParam(parse_rational(r), parse_rational(p))
    return parse_rational(text)


def dump_spec(outputs: Dict[str, Construction]) -> str:
    """Serialize named constructions, sharing identical sub-nodes."""
    ids: Dict[Construction, str] = {}
    lines = [f"version={SPEC_VERSION}"]

    def emit(c: Construction) -> str:
        if c in ids:
            return ids[c]
        if isinstance(c, SubdivisionSystem):
            a, b = c.hull
            lv = "|".join(";".join(f"{format_rational(u)},{format_rational(v)}" for u, v in lvl)
                          for lvl in c.levels)
            body = f"subdivision hull={format_rational(a)},{format_rational(b)} levels={lv}"
            if c.tau is not None:
                body += f" tau={format_rational(c.tau)}"
        elif isinstance(c, GeometricStack):
            blk = emit(c.block)
            blocks = "inf" if c.blocks is None else str(c.blocks)
            body = (f"stack block={blk} ratio={format_rational(c.ratio)} "
                    f"blocks={blocks} zero={int(c.includes_zero)}")
            if c.negative_scale is not None:
                body += f" negscale={_fmt_scale(c.negative_scale)}"
        elif isinstance(c, AffineImage):
            base = emit(c.base)
            body = f"affine scale={_fmt_scale(c.scale)} shift={format_rational(c.shift)} of={base}"
        elif isinstance(c, FiniteUnion):
            parts = ",".join(emit(p) for p in c.parts)
            body = f"union of={parts}"
        else:
            raise TypeError(f"not a construction: {type(c).__name__}")
        name = f"n{len(ids)}"
        ids[c] = name
        lines.append(f"node {name} {body}")
        return name

    refs = [(name, emit(c)) for name, c in outputs.items()]
    for name, ref in refs:
        lines.append(f"output {name} {ref}")
    return "\n".join(lines) + "\n"


def _fields(tokens: Iterable[str], lineno: int) -> Dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise SpecError(f"line {lineno}: expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def _require(f: Dict[str, str], keys, lineno: int, allowed=()) -> None:
    for k in keys:
        if k not in f:
            raise SpecError(f"line {lineno}: missing field {k!r}")
    extra = set(f) - set(keys) - set(allowed)
    if extra:
        raise SpecError(f"line {lineno}: unknown field(s) {sorted(extra)}")


def load_spec(text: str) -> Dict[str, Construction]:
    nodes: Dict[str, Construction] = {}
    outputs: Dict[str, Construction] = {}
    seen_version = False

    def ref(name: str, lineno: int) -> Construction:
        if name not in nodes:
            raise SpecError(f"line {lineno}: undefined node {name!r}")
        return nodes[name]

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not seen_version:
            if line != f"version={SPEC_VERSION}":
                raise SpecError(f"line {lineno}: expected 'version={SPEC_VERSION}' first")
            seen_version = True
            continue
        tokens = line.split()
        try:
            if tokens[0] == "output":
                if len(tokens) != 3:
                    raise SpecError(f"line {lineno}: usage 'output <name> <node>'")
                outputs[tokens[1]] = ref(tokens[2], lineno)
                continue
            if tokens[0] != "node" or len(tokens) < 3:
                raise SpecError(f"line {lineno}: unknown statement {tokens[0]!r}")
            nid, kind, f = tokens[1], tokens[2], _fields(tokens[3:], lineno)
            if nid in nodes:
                raise SpecError(f"line {lineno}: node {nid!r} redefined")
            if kind == "subdivision":
                _require(f, ("hull", "levels"), lineno, ("tau",))
                a, b = (parse_rational(x) for x in f["hull"].split(","))
                levels = []
                if f["levels"]:
                    for lvl in f["levels"].split("|"):
                        kids = []
                        for kid in lvl.split(";"):
                            u, v = (parse_rational(x) for x in kid.split(","))
                            kids.append((u, v))
                        levels.append(tuple(kids))
                tau = parse_rational(f["tau"]) if "tau" in f else None
                nodes[nid] = SubdivisionSystem((a, b), tuple(levels), tau)
            elif kind == "stack":
                _require(f, ("block", "ratio", "blocks", "zero"), lineno, ("negscale",))
                blocks = None if f["blocks"] == "inf" else int(f["blocks"])
                neg = _parse_scale(f["negscale"]) if "negscale" in f else None
                nodes[nid] = GeometricStack(ref(f["block"], lineno), parse_rational(f["ratio"]),
                                            blocks, f["zero"] == "1", neg)
            elif kind == "affine":
                _require(f, ("scale", "shift", "of"), lineno)
                nodes[nid] = AffineImage(_parse_scale(f["scale"]), parse_rational(f["shift"]),
                                         ref(f["of"], lineno))
            elif kind == "union":
                _require(f, ("of",), lineno)
                nodes[nid] = FiniteUnion(tuple(ref(x, lineno) for x in f["of"].split(",")))
            else:
                raise SpecError(f"line {lineno}: unknown node kind {kind!r}")
        except SpecError:
            raise
        except (ValueError, TypeError) as exc:
            raise SpecError(f"line {lineno}: {exc}") from exc
    if not seen_version:
        raise SpecError("missing 'version=1' header")
    if not outputs:
        raise SpecError("spec file declares no outputs")
    return outputs


def write_union_csv(u: IntervalUnion, fh: TextIO) -> None:
    """One row per interval; enclosure endpoints are rounded outward."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for a, b in u:
        lo, hi = Fraction(lower(a)), Fraction(upper(b))
        w.writerow([lo.numerator, lo.denominator, hi.numerator, hi.denominator])


def union_csv(u: IntervalUnion) -> str:
    buf = io.StringIO()
    write_union_csv(u, buf)
    return buf.getvalue()


def read_union_csv(fh: TextIO) -> IntervalUnion:
    rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != CSV_HEADER:
        raise SpecError(f"union CSV must start with header {','.join(CSV_HEADER)}")
    out = []
    for i, row in enumerate(rows[1:], 2):
        if not row:
            continue
        if len(row) != 4:
            raise SpecError(f"row {i}: expected 4 columns")
        ln, ld, rn, rd = (int(x) for x in row)
        out.append((Fraction(ln, ld), Fraction(rn, rd)))
    return normalize_union(out)
