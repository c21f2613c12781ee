"""Command-line driver.

Exit codes: 0 success, 1 diagnostics with errors, 2 usage error,
3 verification mismatch.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import fuzz
from .equivalence import ReductionLevel, reduce
from .hazards import enumerate_all
from .isa import InstructionSet, has_errors, parse_with_lines, validate
from .records import ALL_TYPES, HazardType, case_label, sort_records
from .report import build_diagram, case_matrix, export_csv, render_hazard_table
from .simulate import oracle_enumerate

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_USAGE = 2
EXIT_MISMATCH = 3


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load(path: str, require_instructions: bool = True) -> InstructionSet | None:
    """Parse and validate; print diagnostics; None when there are errors."""
    isa, lines, diags = parse_with_lines(_read(path), Path(path).stem)
    if not has_errors(diags):
        diags = [
            replace(d, line=lines.get(d.location))
            for d in validate(isa, require_instructions)
        ]
    for d in diags:
        _err(str(d))
    return None if has_errors(diags) else isa


def _types(text: str) -> list[HazardType]:
    try:
        return [HazardType.parse(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"unknown hazard type in {text!r}; expected raw, war, waw") from None


def cmd_validate(args) -> int:
    isa = _load(args.path, require_instructions=False)
    return EXIT_OK if isa is not None else EXIT_DIAGNOSTICS


def cmd_reduce(args) -> int:
    isa = _load(args.path)
    if isa is None:
        return EXIT_DIAGNOSTICS
    level = ReductionLevel(args.level)
    reduced = reduce(isa, level)
    print(f"level {level.value}: {len(reduced.classes)} instruction class(es) from {len(isa)} instruction(s)")
    for cls in reduced.classes:
        print(f"class {cls.name} depth={cls.representative.depth} members: {', '.join(cls.members)}")
        for oc in (*cls.sources, *cls.dests):
            key = ",".join(str(k) for k in oc.key)
            members = ", ".join(f"{i}.{n}" for i, n in oc.members)
            print(f"  {oc.role} {oc.representative} key=({key}) members: {members}")
    return EXIT_OK


def cmd_hazards(args) -> int:
    isa = _load(args.path)
    if isa is None:
        return EXIT_DIAGNOSTICS
    types = _types(args.type)
    pair = None
    if args.pair:
        parts = args.pair.split(",")
        if len(parts) != 2:
            raise UsageError("--pair expects OLDER,NEWER")
        for p in parts:
            try:
                isa.get(p)
            except KeyError as exc:
                raise UsageError(str(exc.args[0])) from None
        pair = (parts[0], parts[1])
    records = enumerate_all(isa, types, use_reduction=not args.no_reduce)
    if pair is not None:
        records = [r for r in records if (r.older[0], r.newer[0]) == pair]
    if args.format == "csv":
        sys.stdout.write(export_csv(records))
    else:
        sys.stdout.write(render_hazard_table(records, case_matrix(isa, types, pair), types))
    return EXIT_OK


def cmd_diagram(args) -> int:
    isa = _load(args.path)
    if isa is None:
        return EXIT_DIAGNOSTICS
    t = _types(args.type)
    if len(t) != 1:
        raise UsageError("--type takes exactly one hazard type")
    t = t[0]
    try:
        older, newer = isa.get(args.older), isa.get(args.newer)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    # RAW: older dst vs newer src(s); WAR: older src vs newer dst(s);
    # WAW: older dst vs newer dst(s) given with --dst2
    try:
        if t is HazardType.RAW:
            if not (args.dst and args.src):
                raise UsageError("raw diagrams need --dst and --src")
            older_op, newer_ops = older.dest(args.dst).name, [newer.source(s).name for s in args.src.split(",")]
        elif t is HazardType.WAR:
            if not (args.dst and args.src):
                raise UsageError("war diagrams need --src (older reader) and --dst (newer writer)")
            older_op, newer_ops = older.source(args.src).name, [newer.dest(d).name for d in args.dst.split(",")]
        else:
            if not (args.dst and args.dst2):
                raise UsageError("waw diagrams need --dst and --dst2")
            older_op, newer_ops = older.dest(args.dst).name, [newer.dest(d).name for d in args.dst2.split(",")]
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    records = [r for r in enumerate_all(isa, [t])
               if r.older[0] == older.opcode and r.newer[0] == newer.opcode]
    sys.stdout.write(build_diagram(older, newer, t, older_op, newer_ops, records).render())
    return EXIT_OK


def _describe(r) -> str:
    return (f"{r.type.value} {case_label(r.type, r.older, r.newer)} "
            f"hazard=({r.hazard_pair[0]},{r.hazard_pair[1]}) gap={r.gap} "
            f"{r.resolution} apply_at=({r.apply_at[0]},{r.apply_at[1]})")


def _compare(isa: InstructionSet, source: str) -> int:
    mismatches = 0
    for t in ALL_TYPES:
        rules = set(enumerate_all(isa, [t]))
        oracle = set(oracle_enumerate(isa, [t]))
        for r in sort_records(rules - oracle, isa):
            print(f"MISMATCH {source}: rule engine only: {_describe(r)}")
            mismatches += 1
        for r in sort_records(oracle - rules, isa):
            print(f"MISMATCH {source}: oracle only: {_describe(r)}")
            mismatches += 1
    return mismatches


def cmd_verify(args) -> int:
    if args.fuzz == bool(args.paths):
        raise UsageError("verify takes either ISA files or --fuzz")
    mismatches = 0
    checked = 0
    if args.fuzz:
        for i, isa in fuzz.samples(args.samples, args.seed, args.max_depth, args.max_ops):
            mismatches += _compare(isa, f"sample {i} (seed {args.seed})")
            checked += 1
        print(f"verify: {checked} fuzz samples, seed={args.seed}, max_depth={args.max_depth}, "
              f"max_ops={args.max_ops}: {mismatches} mismatch(es)")
    else:
        for path in args.paths:
            isa = _load(path)
            if isa is None:
                return EXIT_DIAGNOSTICS
            mismatches += _compare(isa, path)
            checked += 1
        print(f"verify: {checked} file(s): {mismatches} mismatch(es)")
    return EXIT_MISMATCH if mismatches else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pipehazard",
        description="Enumerate RAW/WAR/WAW data hazards of a pipelined instruction set.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an ISA description file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("reduce", help="list equivalence classes")
    p.add_argument("path")
    p.add_argument("--level", choices=[lv.value for lv in ReductionLevel], default="full")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("hazards", help="enumerate hazards and their resolutions")
    p.add_argument("path")
    p.add_argument("--type", default="raw,war,waw", help="comma-separated subset of raw,war,waw")
    p.add_argument("--pair", help="restrict to OLDER,NEWER instruction pair")
    p.add_argument("--format", choices=["table", "csv"], default="table")
    p.add_argument("--no-reduce", action="store_true", help="skip equivalence reduction")
    p.set_defaults(func=cmd_hazards)

    p = sub.add_parser("diagram", help="ASCII coupled-sequence diagram for one binding")
    p.add_argument("path")
    p.add_argument("--older", required=True)
    p.add_argument("--newer", required=True)
    p.add_argument("--type", required=True, help="raw, war or waw")
    p.add_argument("--dst", help="destination operand (older for raw/waw, newer for war)")
    p.add_argument("--src", help="source operand(s) (newer for raw, older for war); comma-separated to condense")
    p.add_argument("--dst2", help="newer destination operand(s) for waw")
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("verify", help="check the rule engine against the cycle-level oracle")
    p.add_argument("paths", nargs="*")
    p.add_argument("--fuzz", action="store_true")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-depth", type=int, default=8)
    p.add_argument("--max-ops", type=int, default=3)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
