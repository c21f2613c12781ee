"""Text tables, ASCII coupled-sequence diagrams, CSV and ISA rendering."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from .isa import InstructionSet, InstructionSpec
from .records import (
    ALL_TYPES,
    HazardRecord,
    HazardType,
    Resolution,
    case_label,
    stalled_label,
)

# --------------------------------------------------------------------------
# hazard tables

Case = tuple[HazardType, tuple[str, str], tuple[str, str]]


def case_matrix(isa: InstructionSet, types: Iterable[HazardType] = ALL_TYPES,
                pair: tuple[str, str] | None = None) -> list[Case]:
    """Every operand binding that could carry a hazard, in canonical order."""
    types = [t for t in ALL_TYPES if t in set(types)]
    cases: list[Case] = []
    for t in types:
        for older in isa.instructions:
            for newer in isa.instructions:
                if pair is not None and (older.opcode, newer.opcode) != pair:
                    continue
                if t is HazardType.RAW:
                    left, right = older.dests, newer.sources
                elif t is HazardType.WAR:
                    left, right = older.sources, newer.dests
                else:
                    left, right = older.dests, newer.dests
                for a in left:
                    for b in right:
                        cases.append((t, (older.opcode, a.name), (newer.opcode, b.name)))
    return cases


def _columns(t: HazardType) -> list[str]:
    if t is HazardType.RAW:
        return ["Case", "Hazard", "Soln.", "Stalled inst.", "# of stall cycles"]
    return ["Case", "Hazard", "Stalled inst.", "# of stall cycles"]


def _row(r: HazardRecord, label: str) -> list[str]:
    hazard = f"({r.hazard_pair[0]},{r.hazard_pair[1]})"
    if r.resolution.is_stall:
        stalled, cycles = stalled_label(r), str(r.resolution.stall_cycles)
    else:
        stalled, cycles = "-", "-"
    if r.type is HazardType.RAW:
        soln = "stall" if r.resolution.is_stall else f"forward {r.resolution.forward_from}->{r.resolution.forward_to}"
        return [label, hazard, soln, stalled, cycles]
    return [label, hazard, stalled, cycles]


def format_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]

    def line(cells):
        return " | ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    rule = "-+-".join("-" * w for w in widths)
    return "\n".join([line(header), rule, *(line(r) for r in rows)])


def render_hazard_table(records: Sequence[HazardRecord], cases: Sequence[Case] | None = None,
                        types: Iterable[HazardType] | None = None) -> str:
    """One table per hazard type, grouped by case.

    With *cases*, every listed case gets a row; cases without hazards are
    shown as a ``-`` row.  Without it only cases that have records appear.
    """
    grouped: dict[Case, list[HazardRecord]] = {}
    for r in records:
        grouped.setdefault((r.type, r.older, r.newer), []).append(r)
    order = list(cases) if cases is not None else []
    for c in grouped:
        if c not in order:
            order.append(c)
    if types is None:
        types = {c[0] for c in order} or set(ALL_TYPES)
    blocks = []
    for t in ALL_TYPES:
        if t not in set(types):
            continue
        header = _columns(t)
        rows = []
        for c in order:
            if c[0] is not t:
                continue
            label = case_label(*c)
            recs = grouped.get(c, [])
            if not recs:
                rows.append([label] + ["-"] * (len(header) - 1))
            for i, r in enumerate(recs):
                rows.append(_row(r, label if i == 0 else ""))
        blocks.append(f"{t.value} hazards\n" + format_table(header, rows))
    return "\n\n".join(blocks) + "\n"


# --------------------------------------------------------------------------
# diagrams

OFF = "."
ON = "o"
STALL = "S"
FORWARD = "F"

LEGEND = (
    "legend: rows = newer instruction stage (stage 1 at the bottom), "
    "columns = older instruction stage\n"
    "  o  stage pair on some coupled sequence   .  never co-resident\n"
    "  S  hazard resolved by stalling           F  hazard resolved by forwarding\n"
    "  >  critical stage of the newer instruction\n"
    "  older interval row: 1 = not yet available/needed, 2 = in pipeline "
    "registers/not yet accessed, 3 = at final destination/already accessed"
)


@dataclass(frozen=True)
class Diagram:
    title: str
    rows: int  # newer depth
    cols: int  # older depth
    cells: dict[tuple[int, int], str]  # (newer_stage, older_stage) -> glyph
    critical_rows: tuple[int, ...]
    intervals: tuple[int, ...]  # per older stage: 1, 2 or 3

    def hazards(self) -> dict[tuple[int, int], str]:
        return {p: g for p, g in self.cells.items() if g in (STALL, FORWARD)}

    def render(self) -> str:
        lines = [self.title]
        for a in range(self.rows, 0, -1):
            mark = ">" if a in self.critical_rows else " "
            cells = " ".join(self.cells[(a, b)] for b in range(1, self.cols + 1))
            lines.append(f"{mark}{a:>3} | {cells}")
        lines.append("     +" + "-" * (2 * self.cols))
        lines.append("       " + " ".join(str(b % 10) for b in range(1, self.cols + 1)))
        lines.append("       " + " ".join(str(i) for i in self.intervals) + "   older interval")
        lines.append(LEGEND)
        return "\n".join(lines) + "\n"


def _older_intervals(older: InstructionSpec, t: HazardType, older_operand: str) -> tuple[int, ...]:
    out = []
    for k in range(1, older.depth + 1):
        if t is HazardType.RAW:
            d = older.dest(older_operand)
            out.append(1 if k < d.first_avail else 2 if k <= d.last_avail else 3)
        else:
            stage = older.source(older_operand).read if t is HazardType.WAR else older.dest(older_operand).write
            out.append(2 if k <= stage else 3)
    return tuple(out)


def _critical(newer: InstructionSpec, t: HazardType, name: str) -> int:
    if t is HazardType.RAW:
        return newer.source(name).last_needed
    return newer.dest(name).write


def build_diagram(older: InstructionSpec, newer: InstructionSpec, hazard_type: HazardType,
                  older_operand: str, newer_operands: Sequence[str],
                  records: Iterable[HazardRecord]) -> Diagram:
    """Grid of stage pairs for one older operand against one or more newer
    operands; several newer operands give a condensed diagram."""
    newer_operands = list(newer_operands)
    crit = tuple(sorted({_critical(newer, hazard_type, n) for n in newer_operands}))
    cells = {}
    for a in range(1, newer.depth + 1):
        for b in range(1, older.depth + 1):
            cells[(a, b)] = ON if b > a else OFF
    for r in records:
        if (r.type is hazard_type and r.older == (older.opcode, older_operand)
                and r.newer[0] == newer.opcode and r.newer[1] in newer_operands):
            cells[r.hazard_pair] = STALL if r.resolution.is_stall else FORWARD
    names = ",".join(newer_operands)
    title = (f"{hazard_type.value} {case_label(hazard_type, (older.opcode, older_operand), (newer.opcode, names))}"
             f"  (rows: {newer.opcode} stage, columns: {older.opcode} stage)")
    return Diagram(title, newer.depth, older.depth, cells, crit,
                   _older_intervals(older, hazard_type, older_operand))


def render_diagram(older: InstructionSpec, newer: InstructionSpec, hazard_type: HazardType,
                   older_operand: str, newer_operands: Sequence[str],
                   records: Iterable[HazardRecord]) -> str:
    return build_diagram(older, newer, hazard_type, older_operand, newer_operands, records).render()


def parse_diagram_marks(text: str) -> dict[tuple[int, int], str]:
    """Read hazard glyphs back out of a rendered diagram."""
    marks = {}
    for line in text.splitlines():
        head, sep, body = line.partition(" | ")
        if not sep or not head[1:].strip().isdigit():
            continue
        a = int(head[1:])
        for b, glyph in enumerate(body.split(), start=1):
            if glyph in (STALL, FORWARD):
                marks[(a, b)] = glyph
    return marks


# --------------------------------------------------------------------------
# CSV

CSV_HEADER = [
    "type", "older_inst", "older_operand", "newer_inst", "newer_operand",
    "newer_stage", "older_stage", "gap", "action", "forward_from", "forward_to",
    "stall_cycles", "apply_newer_stage", "apply_older_stage",
]


def _opt(v: int | None) -> str:
    return "" if v is None else str(v)


def export_csv(records: Iterable[HazardRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        res = r.resolution
        w.writerow([
            r.type.value, *r.older, *r.newer, *r.hazard_pair, r.gap, res.kind,
            _opt(res.forward_from), _opt(res.forward_to), _opt(res.stall_cycles),
            *r.apply_at,
        ])
    return buf.getvalue()


def import_csv(text: str) -> list[HazardRecord]:
    rows = csv.DictReader(io.StringIO(text))
    if rows.fieldnames != CSV_HEADER:
        raise ValueError(f"unexpected CSV header: {rows.fieldnames}")
    out = []
    for row in rows:
        if row["action"] == "stall":
            res = Resolution.stall(int(row["stall_cycles"]))
            stalled = row["newer_inst"]
        else:
            res = Resolution.forward(int(row["forward_from"]), int(row["forward_to"]))
            stalled = None
        out.append(HazardRecord(
            HazardType(row["type"]),
            (row["older_inst"], row["older_operand"]),
            (row["newer_inst"], row["newer_operand"]),
            (int(row["newer_stage"]), int(row["older_stage"])),
            int(row["gap"]),
            res,
            (int(row["apply_newer_stage"]), int(row["apply_older_stage"])),
            stalled,
        ))
    return out


# --------------------------------------------------------------------------
# ISA files

def render_isa(isa: InstructionSet) -> str:
    blocks = []
    for inst in isa.instructions:
        lines = [f"instruction {inst.opcode} depth={inst.depth}"]
        for s in inst.sources:
            lines.append(f"  src {s.name} read={s.read} first_needed={s.first_needed} last_needed={s.last_needed}")
        for d in inst.dests:
            lines.append(f"  dst {d.name} write={d.write} first_avail={d.first_avail} last_avail={d.last_avail}")
        lines.append("end")
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)
