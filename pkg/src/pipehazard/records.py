"""Hazard records: what was found, where in the coupled sequence, and the fix."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .isa import InstructionSet


class HazardType(str, Enum):
    RAW = "RAW"
    WAR = "WAR"
    WAW = "WAW"

    @classmethod
    def parse(cls, text: str) -> "HazardType":
        return cls(text.strip().upper())


ALL_TYPES = (HazardType.RAW, HazardType.WAR, HazardType.WAW)


@dataclass(frozen=True)
class Resolution:
    kind: str  # "forward" | "stall"
    forward_from: int | None = None
    forward_to: int | None = None
    stall_cycles: int | None = None

    @classmethod
    def forward(cls, src_stage: int, dst_stage: int) -> "Resolution":
        return cls("forward", forward_from=src_stage, forward_to=dst_stage)

    @classmethod
    def stall(cls, cycles: int) -> "Resolution":
        return cls("stall", stall_cycles=cycles)

    @property
    def is_stall(self) -> bool:
        return self.kind == "stall"

    def __str__(self) -> str:
        if self.is_stall:
            return f"stall {self.stall_cycles}"
        return f"forward {self.forward_from}->{self.forward_to}"


@dataclass(frozen=True)
class HazardRecord:
    """One hazard between an older and a newer instruction.

    ``older`` and ``newer`` are ``(instruction, operand)`` names.  For RAW the
    older side is the producer's destination and the newer side the
    consumer's source; for WAR the older side is the reader's source and the
    newer side the writer's destination; for WAW both are destinations.
    Stage pairs are ``(newer_stage, older_stage)``.
    """

    type: HazardType
    older: tuple[str, str]
    newer: tuple[str, str]
    hazard_pair: tuple[int, int]
    gap: int
    resolution: Resolution
    apply_at: tuple[int, int]
    stalled: str | None = None

    @property
    def case(self) -> tuple[HazardType, str, str, str, str]:
        return (self.type, *self.older, *self.newer)


def case_label(hazard_type: HazardType, older: tuple[str, str], newer: tuple[str, str]) -> str:
    """Case name in ``writer.d = reader.s`` style."""
    (oi, oo), (ni, no) = older, newer
    if oi == ni:
        oi, ni = f"{oi}(1)", f"{ni}(2)"
    if hazard_type is HazardType.WAR:
        return f"{ni}.{no} = {oi}.{oo}"
    return f"{oi}.{oo} = {ni}.{no}"


def stalled_label(record: HazardRecord) -> str:
    if record.stalled is None:
        return "-"
    if record.older[0] == record.newer[0]:
        return f"{record.stalled}(2)"
    return record.stalled


def _type_rank(t: HazardType) -> int:
    return ALL_TYPES.index(t)


def sort_key(isa: InstructionSet):
    """Canonical order: type, older then newer instruction in declaration
    order, older then newer operand in declaration order, newer stage, older
    stage, resolution kind."""
    inst_pos = {inst.opcode: i for i, inst in enumerate(isa.instructions)}
    op_pos: dict[tuple[str, str], int] = {}
    for inst in isa.instructions:
        for i, op in enumerate((*inst.sources, *inst.dests)):
            op_pos[(inst.opcode, op.name)] = i

    def key(r: HazardRecord):
        return (
            _type_rank(r.type),
            inst_pos[r.older[0]],
            inst_pos[r.newer[0]],
            op_pos[r.older],
            op_pos[r.newer],
            r.hazard_pair,
            r.resolution.kind,
        )

    return key


def sort_records(records: Iterable[HazardRecord], isa: InstructionSet) -> list[HazardRecord]:
    return sorted(records, key=sort_key(isa))
