"""Command line: ``lognf {nf,eq,wp,meter,bench}``.

Exit codes: 0 success (or true), 1 false, 2 usage or parse error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .errors import (ArityError, CosetTableError, GroupSyntaxError, LognfError,
                     MalformedExponent, MissingOracle, UnknownGenerator)
from .factory import build
from .lang import format_word, parse_group, parse_word
from .machine import BUFFERED, METERED, equal_nf, run
from .sampling import METER_HEADER, sweep

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3

PARSE_ERRORS = (GroupSyntaxError, ArityError, MissingOracle, UnknownGenerator,
                MalformedExponent, CosetTableError)

BENCH_GROUPS = ("Z", "Free(2)", "Direct(Z,Z)", "BS(1,2)", "UT(3)", "FreeProd(Cyclic(2),Cyclic(3))",
                "Torus(2,3)", "Wreath(Cyclic(2),Z)")


class UsageError(Exception):
    pass


def _read_word(arg: str) -> str:
    if arg == "-":
        return sys.stdin.readline().strip()
    return arg


def _lengths(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --lengths {text!r}") from None
    if not values or any(v < 0 for v in values) or values != sorted(values):
        raise UsageError("--lengths must be a non-empty ascending list of non-negative integers")
    return values


def cmd_nf(args) -> int:
    f, _ = build(parse_group(args.group, args.base_dir))
    word = parse_word(_read_word(args.word), f.alphabet_in)
    out, report = run(f, word, mode=args.mode, step_limit=args.step_limit)
    print(format_word(out))
    if args.meter:
        print(report.csv_row(), file=sys.stderr)
    return EXIT_OK


def cmd_eq(args) -> int:
    f, _ = build(parse_group(args.group, args.base_dir))
    u = parse_word(_read_word(args.left), f.alphabet_in)
    v = parse_word(_read_word(args.right), f.alphabet_in)
    same = equal_nf(f, u, v, mode=args.mode, step_limit=args.step_limit)
    print("true" if same else "false")
    return EXIT_OK if same else EXIT_FALSE


def cmd_wp(args) -> int:
    f, _ = build(parse_group(args.group, args.base_dir))
    w = parse_word(_read_word(args.word), f.alphabet_in)
    trivial = equal_nf(f, w, (), mode=args.mode, step_limit=args.step_limit)
    print("true" if trivial else "false")
    return EXIT_OK if trivial else EXIT_FALSE


def _write_rows(path: str | None, header: str, rows) -> None:
    fh = sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8")
    try:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")
            fh.flush()
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_meter(args) -> int:
    f, _ = build(parse_group(args.group, args.base_dir))
    lengths = _lengths(args.lengths)
    rows = (m.csv_row() for m in sweep(f, lengths, args.samples, args.seed, mode=args.mode,
                                       step_limit=args.step_limit,
                                       seconds_per_run=args.time_limit))
    _write_rows(args.out, METER_HEADER, rows)
    return EXIT_OK


def cmd_bench(args) -> int:
    lengths = _lengths(args.lengths)
    groups = args.groups.split(";") if args.groups else list(BENCH_GROUPS)

    def rows():
        for g in groups:
            f, _ = build(parse_group(g, args.base_dir))
            for m in sweep(f, lengths, args.samples, args.seed, mode=args.mode,
                           step_limit=args.step_limit, seconds_per_run=args.time_limit):
                yield f'"{g}",{m.csv_row()}'

    _write_rows(args.out, "group," + METER_HEADER, rows())
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lognf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, group=True):
        if group:
            p.add_argument("--group", required=True, help="group expression, e.g. 'BS(1,2)'")
        p.add_argument("--base-dir", default=None, help="directory for @file references")
        p.add_argument("--mode", choices=(METERED, BUFFERED), default=METERED)
        p.add_argument("--step-limit", type=int, default=10**9)

    p = sub.add_parser("nf", help="print the normal form of a word")
    common(p)
    p.add_argument("--word", required=True, help="word, or '-' to read a line from stdin")
    p.add_argument("--meter", action="store_true", help="write the space report to stderr")
    p.set_defaults(func=cmd_nf)

    p = sub.add_parser("eq", help="do two words represent the same element")
    common(p)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.set_defaults(func=cmd_eq)

    p = sub.add_parser("wp", help="does a word represent the identity")
    common(p)
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_wp)

    for name, func in (("meter", cmd_meter), ("bench", cmd_bench)):
        p = sub.add_parser(name, help="space sweep over random words, as CSV")
        common(p, group=(name == "meter"))
        if name == "bench":
            p.add_argument("--groups", default=None,
                           help="';'-separated group expressions (default: a fixed set)")
        p.add_argument("--lengths", default="64,128,256,512,1024")
        p.add_argument("--samples", type=int, default=5)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="CSV file (default stdout)")
        p.add_argument("--time-limit", type=float, default=None,
                       help="seconds allowed per execution")
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, *PARSE_ERRORS) as exc:
        print(f"lognf: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LognfError, OSError) as exc:
        print(f"lognf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
