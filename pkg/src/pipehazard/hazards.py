"""Closed-form hazard enumeration.

Each rule walks the older instruction's stage ``k`` at the moment the newer
instruction reaches its critical stage (``last_needed`` for a RAW consumer,
``write`` for a WAR/WAW writer).  The entry gap is then ``k - critical``.
Stalls are always applied to the newer instruction at its first stage.
"""
from __future__ import annotations

from typing import Iterable

from .equivalence import ReductionLevel, expand, reduce
from .isa import DestOperand, InstructionSet, InstructionSpec, SourceOperand
from .records import ALL_TYPES, HazardRecord, HazardType, Resolution, sort_records


def raw_hazards(producer: InstructionSpec, d: DestOperand,
                consumer: InstructionSpec, s: SourceOperand) -> list[HazardRecord]:
    ln, fa, la = s.last_needed, d.first_avail, d.last_avail
    older, newer = (producer.opcode, d.name), (consumer.opcode, s.name)
    out = []
    # k < fa: result not produced yet, hold the consumer until k reaches fa
    for k in range(ln + 1, fa):
        out.append(HazardRecord(
            HazardType.RAW, older, newer, (ln, k), k - ln,
            Resolution.stall(fa - k), (1, k - ln + 1), consumer.opcode,
        ))
    # fa <= k <= la: result sits in a pipeline register, bypass it
    for k in range(max(fa, ln + 1), la + 1):
        out.append(HazardRecord(
            HazardType.RAW, older, newer, (ln, k), k - ln,
            Resolution.forward(k, ln), (ln, k),
        ))
    return out


def war_hazards(reader: InstructionSpec, s: SourceOperand,
                writer: InstructionSpec, d: DestOperand) -> list[HazardRecord]:
    w, r = d.write, s.read
    last = min(r, reader.depth)
    return [
        HazardRecord(
            HazardType.WAR, (reader.opcode, s.name), (writer.opcode, d.name),
            (w, k), k - w, Resolution.stall(r - k + 1), (1, k - w + 1), writer.opcode,
        )
        for k in range(w + 1, last + 1)
    ]


def waw_hazards(first_writer: InstructionSpec, d_i: DestOperand,
                second_writer: InstructionSpec, d_j: DestOperand) -> list[HazardRecord]:
    wi, wj = d_i.write, d_j.write
    last = min(wi, first_writer.depth)
    return [
        HazardRecord(
            HazardType.WAW, (first_writer.opcode, d_i.name), (second_writer.opcode, d_j.name),
            (wj, k), k - wj, Resolution.stall(wi - k + 1), (1, k - wj + 1), second_writer.opcode,
        )
        for k in range(wj + 1, last + 1)
    ]


def _enumerate_plain(isa: InstructionSet, types: Iterable[HazardType]) -> list[HazardRecord]:
    types = set(types)
    out: list[HazardRecord] = []
    for older in isa.instructions:
        for newer in isa.instructions:
            if HazardType.RAW in types:
                for d in older.dests:
                    for s in newer.sources:
                        out.extend(raw_hazards(older, d, newer, s))
            if HazardType.WAR in types:
                for s in older.sources:
                    for d in newer.dests:
                        out.extend(war_hazards(older, s, newer, d))
            if HazardType.WAW in types:
                for di in older.dests:
                    for dj in newer.dests:
                        out.extend(waw_hazards(older, di, newer, dj))
    return out


# RAW only looks at (last_needed) and (first_avail, last_avail); WAR and WAW
# only look at read/write stages.
LEVEL_FOR_TYPE = {
    HazardType.RAW: ReductionLevel.RAW,
    HazardType.WAR: ReductionLevel.WRITE,
    HazardType.WAW: ReductionLevel.WRITE,
}


def enumerate_all(isa: InstructionSet, types: Iterable[HazardType] = ALL_TYPES,
                  use_reduction: bool = True) -> list[HazardRecord]:
    """Every hazard between every ordered pair of instructions (self-pairs
    included), in canonical order."""
    types = list(dict.fromkeys(types))
    if not use_reduction:
        return sort_records(_enumerate_plain(isa, types), isa)
    out: list[HazardRecord] = []
    by_level: dict[ReductionLevel, list[HazardType]] = {}
    for t in types:
        by_level.setdefault(LEVEL_FOR_TYPE[t], []).append(t)
    for level, level_types in by_level.items():
        reduced = reduce(isa, level)
        class_records = _enumerate_plain(reduced.as_instruction_set(), level_types)
        out.extend(expand(class_records, reduced))
    return sort_records(out, isa)
