"""Command line front end: classify one discriminant, scan a range, reproduce the reference tables."""
from __future__ import annotations

import argparse
import difflib
import json
import logging
import sys
from dataclasses import fields
from importlib import resources

from . import oracle
from .classifier import (
    ClassificationReport,
    OracleFormulaMismatch,
    OracleMode,
    Options,
    Rank,
    classify,
    scan,
)
from .discriminants import NotFundamental, assign_roles
from .formulas import biquadratic_class_number, two_part
from .groups import AbelianGroupStructure
from .quartic import BiquadraticField, dihedral_closure_data

EXIT_OK, EXIT_SCOPE, EXIT_ORACLE, EXIT_MISMATCH = 0, 1, 2, 3

TSV_COLUMNS = ("d", "factors", "case", "cl2_k", "m", "f", "cl2_K", "cl2_K_twin", "h2_K1", "h2_K2",
               "h2_L", "q1", "q2", "am2_M", "scholz", "rank", "reason")

_GROUP_FIELDS = {"cl2_k", "cl2_K", "cl2_K_twin"}
_TUPLE_FIELDS = {"factors", "roles", "conic", "f", "errors"}


# records ------------------------------------------------------------------------------------------

def to_record(r: ClassificationReport) -> dict:
    out = {}
    for f in fields(r):
        v = getattr(r, f.name)
        if isinstance(v, AbelianGroupStructure):
            v = v.as_list()
        elif isinstance(v, Rank):
            v = v.value
        elif isinstance(v, tuple):
            v = list(v)
        out[f.name] = v
    return out


def from_record(rec: dict) -> ClassificationReport:
    kw = {}
    for f in fields(ClassificationReport):
        v = rec.get(f.name)
        if v is not None:
            if f.name in _GROUP_FIELDS:
                v = AbelianGroupStructure(tuple(v))
            elif f.name in _TUPLE_FIELDS:
                v = tuple(v)
            elif f.name == "rank":
                v = Rank(v)
        if v is not None or f.name not in ("provenance", "errors"):
            kw[f.name] = v
    return ClassificationReport(**kw)


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, AbelianGroupStructure):
        return ",".join(map(str, v.elementary_divisors)) or "1"
    if isinstance(v, Rank):
        return v.label
    if isinstance(v, tuple):
        return ",".join(map(str, v))
    return str(v)


def to_tsv(r: ClassificationReport) -> str:
    return "\t".join(_cell(getattr(r, c)) for c in TSV_COLUMNS)


def poly_str(coeffs) -> str:
    n = len(coeffs) - 1
    parts = []
    for i, c in enumerate(coeffs):
        e = n - i
        if c == 0:
            continue
        mon = "" if e == 0 else ("x" if e == 1 else f"x^{e}")
        mag = abs(c)
        coef = str(mag) if (mag != 1 or e == 0) else ""
        sign = "-" if c < 0 else "+"
        parts.append((sign, coef + mon))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, t in parts[1:]:
        s += f" {sign} {t}"
    return s


def to_pretty(r: ClassificationReport) -> str:
    lines = [f"d = {r.d}   factors {' · '.join(map(str, r.factors))}   Cl2(k) = {r.cl2_k}"]
    if not r.in_scope:
        lines.append(f"out of scope ({r.reason}); 4-rank {r.four_rank}")
        return "\n".join(lines)
    d1, d2, d3 = r.roles
    lines.append(f"type {r.case}: d1 = {d1}, d2 = {d2}, d3 = {d3}; m = {r.m}")
    lines.append(f"K: {poly_str(r.f)}   alpha = {r.alpha}")
    if r.cl2_K is not None:
        lines.append(f"Cl2(K) = {r.cl2_K}   Cl2(K~) = {r.cl2_K_twin}   h2(K1) = {r.h2_K1}   h2(L) = {r.h2_L}")
        lines.append(f"q1 = {r.q1}, q2 = {r.q2}")
    else:
        lines.append(f"h2(K) = {r.h2_K if r.h2_K else '>= 4'} (formula path)")
    lines.append(f"#Am2(M/F) = {r.am2_M}")
    lines.append(f"rank Cl2(k^1): {r.rank.label}")
    for e in r.errors:
        lines.append(f"warning: {e}")
    return "\n".join(lines)


def render(r: ClassificationReport, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(to_record(r), sort_keys=True)
    if fmt == "tsv":
        return to_tsv(r)
    return to_pretty(r)


# options ------------------------------------------------------------------------------------------

def _options(args) -> Options:
    mode = OracleMode.OFF if args.no_oracle else OracleMode(args.oracle)
    if mode is OracleMode.OFF:
        oracle.disable(True)
    return Options(oracle=mode, oracle_bound=args.oracle_bound, cache_path=args.cache)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "tsv", "pretty"), default="pretty")
    p.add_argument("--oracle", choices=("auto", "on", "off"), default="auto")
    p.add_argument("--no-oracle", action="store_true", help="same as --oracle off")
    p.add_argument("--oracle-bound", type=int, default=10 ** 4, help="cap on the Minkowski bound")
    p.add_argument("--cache", help="class group cache file")


# commands -----------------------------------------------------------------------------------------

def cmd_classify(args) -> int:
    try:
        r = classify(args.d, _options(args))
    except NotFundamental:
        print(f"{args.d} is not a negative fundamental discriminant", file=sys.stderr)
        return EXIT_SCOPE
    except (oracle.OracleBoundExceeded, oracle.OracleStalled, OracleFormulaMismatch) as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    print(render(r, args.format))
    if not r.in_scope:
        print(f"out of scope: {r.reason}", file=sys.stderr)
        return EXIT_SCOPE
    return EXIT_OK


def cmd_scan(args) -> int:
    opts = _options(args)
    if args.format == "tsv":
        print("\t".join(TSV_COLUMNS))
    try:
        for r in scan(args.min, args.max, opts, jobs=args.jobs):
            if args.only == "in-scope" and not r.in_scope:
                continue
            if args.only == "hits" and not r.is_hit:
                continue
            print(render(r, args.format), flush=True)
    except (oracle.OracleBoundExceeded, oracle.OracleStalled, OracleFormulaMismatch) as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    return EXIT_OK


def _fixture(name: str) -> list[list[str]]:
    text = resources.files("rank2tower").joinpath("data", name).read_text()
    return [ln.split("\t") for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


def _norm_factors(cell: str) -> str:
    if cell == "-":
        return cell
    return ",".join(map(str, sorted(int(x) for x in cell.split(","))))


def table1_rows(opts: Options) -> list[list[str]]:
    out = []
    for row in _fixture("table1.txt"):
        r = classify(int(row[0]), opts)
        if r.in_scope:
            cells = [str(r.d), _cell(r.factors), _cell(r.cl2_k), r.case, _cell(r.f),
                     _cell(r.cl2_K) if r.cl2_K is not None else "n/c", r.rank.label]
        else:
            # r for such fields rests on a degree-8 computation that is not reproduced
            cells = [str(r.d), _cell(r.factors), _cell(r.cl2_k), "-", "-", "-", "n/c"]
        out.append(cells)
    return out


def _cmp_row(expected: list[str], got: list[str]) -> bool:
    """Cells computed as "n/c" (not computed) are skipped."""
    e, g = list(expected), list(got)
    e[1], g[1] = _norm_factors(e[1]), _norm_factors(g[1])
    return all(x == y for x, y in zip(e, g) if y != "n/c")


def cmd_table1(args) -> int:
    opts = _options(args)
    expected = _fixture("table1.txt")
    got = table1_rows(opts)
    print("\t".join(("d", "factors", "Cl2(k)", "type", "f", "Cl2(K)", "r")))
    for g in got:
        print("\t".join(g))
    ok = sum(_cmp_row(e, g) for e, g in zip(expected, got))
    print(f"{ok}/{len(expected)} rows match (kgen column skipped; n/c cells not computed)")
    if ok != len(expected):
        exp = ["\t".join(e) for e in expected]
        cur = ["\t".join(g) for g in got]
        sys.stdout.writelines(difflib.unified_diff([x + "\n" for x in exp], [x + "\n" for x in cur],
                                                   "reference", "computed"))
        return EXIT_MISMATCH
    return EXIT_OK


def table2_rows(opts: Options) -> list[tuple[int, tuple[int, int], AbelianGroupStructure, int, AbelianGroupStructure | None]]:
    """(d, radicands, printed Cl2(M), 2-part of the class number formula, oracle Cl2(M) or None)."""
    oo = oracle.OracleOptions(opts.oracle_bound, opts.certify,
                              oracle.ClassGroupCache(opts.cache_path)) if opts.oracle is not OracleMode.OFF else None
    out = []
    for row in _fixture("table2.txt"):
        d = int(row[0])
        data = dihedral_closure_data(assign_roles(d))
        computed = {m.discs: m for m in data.M_fields}
        for a, b, g in ((row[1], row[2], row[3]), (row[4], row[5], row[6])):
            a, b = int(a), int(b)
            M = BiquadraticField.from_radicands(a, b)
            if M.discs not in computed:
                raise ValueError(f"Q(√{a}, √{b}) is not one of the fields attached to {d}")
            printed = AbelianGroupStructure(tuple(int(x) for x in g.split(",")))
            eq1 = two_part(biquadratic_class_number(a, b).h)
            orc = oracle.cl2(M.polynomial(), oo) if oo else None
            out.append((d, (a, b), printed, eq1, orc))
    return out


def cmd_table2(args) -> int:
    opts = _options(args)
    rows = table2_rows(opts)
    ok = 0
    exp, cur = [], []
    for d, (a, b), printed, eq1, orc in rows:
        match = (orc == printed if orc is not None else True) and eq1 == printed.order
        ok += match
        label = f"{d}\tQ(√{a}, √{b})"
        exp.append(f"{label}\t{printed}\t{printed.order}\n")
        cur.append(f"{label}\t{orc if orc is not None else 'n/c'}\t{eq1}\n")
        print(f"{label}\tprinted {printed}\toracle {orc if orc is not None else 'n/c'}\tformula order {eq1}"
              f"\t{'ok' if match else 'MISMATCH'}")
    print(f"{ok}/{len(rows)} class groups match")
    if ok != len(rows):
        sys.stdout.writelines(difflib.unified_diff(exp, cur, "reference", "computed"))
        return EXIT_MISMATCH
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rank2tower",
                                description="Rank of the 2-class group of the Hilbert 2-class field "
                                            "of imaginary quadratic fields with Cl2(k) = (2, 2^m).")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="report for one discriminant")
    c.add_argument("-d", type=int, required=True)
    _common(c)
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("scan", help="reports for a range of discriminants")
    s.add_argument("--min", type=int, required=True)
    s.add_argument("--max", type=int, default=-1)
    s.add_argument("--only", choices=("in-scope", "all", "hits"), default="all")
    s.add_argument("--jobs", type=int, default=1)
    _common(s)
    s.set_defaults(func=cmd_scan)

    for name, fn in (("table1", cmd_table1), ("table2", cmd_table2)):
        t = sub.add_parser(name, help=f"recompute reference {name} and compare")
        _common(t)
        t.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
