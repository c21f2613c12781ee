"""Grouping of operands and instructions with identical timing keys.

Hazard analysis only depends on a few stage numbers per operand, so any two
operands (and instructions) that agree on those numbers produce the same
hazards.  Three levels are defined:

* ``FULL``  - source ``(read, last_needed)``, destination ``(write, first_avail, last_avail)``
* ``RAW``   - source ``(last_needed,)``, destination ``(first_avail, last_avail)``
* ``WRITE`` - source ``(read,)``, destination ``(write,)``

Instructions additionally need equal depth to be merged.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .isa import InstructionSet, InstructionSpec, Operand, SourceOperand
from .records import HazardRecord, sort_records


class ReductionLevel(str, Enum):
    FULL = "full"
    RAW = "raw"
    WRITE = "write"


def operand_key(op: Operand, level: ReductionLevel) -> tuple[int, ...]:
    if isinstance(op, SourceOperand):
        if level is ReductionLevel.FULL:
            return (op.read, op.last_needed)
        if level is ReductionLevel.RAW:
            return (op.last_needed,)
        return (op.read,)
    if level is ReductionLevel.FULL:
        return (op.write, op.first_avail, op.last_avail)
    if level is ReductionLevel.RAW:
        return (op.first_avail, op.last_avail)
    return (op.write,)


@dataclass(frozen=True)
class OperandClass:
    role: str  # "src" | "dst"
    key: tuple[int, ...]
    members: tuple[tuple[str, str], ...]  # (opcode, operand name)

    @property
    def representative(self) -> str:
        return self.members[0][1]

    def names_for(self, opcode: str) -> list[str]:
        return [name for op, name in self.members if op == opcode]


@dataclass(frozen=True)
class InstructionClass:
    representative: InstructionSpec
    members: tuple[str, ...]
    sources: tuple[OperandClass, ...]
    dests: tuple[OperandClass, ...]

    @property
    def name(self) -> str:
        return self.representative.opcode

    def operand_class(self, name: str) -> OperandClass:
        for oc in (*self.sources, *self.dests):
            if oc.representative == name:
                return oc
        raise KeyError(f"class {self.name} has no operand class {name!r}")


@dataclass(frozen=True)
class ReducedSet:
    level: ReductionLevel
    classes: tuple[InstructionClass, ...]
    origin: InstructionSet

    def as_instruction_set(self) -> InstructionSet:
        """The class representatives as a stand-alone instruction set."""
        return InstructionSet(self.origin.name, tuple(c.representative for c in self.classes))

    def get(self, name: str) -> InstructionClass:
        for c in self.classes:
            if c.name == name:
                return c
        raise KeyError(f"unknown instruction class {name!r}")


def _group(ops, level):
    """Partition operands by key, in order of first appearance."""
    groups: dict[tuple[int, ...], list] = {}
    for op in ops:
        groups.setdefault(operand_key(op, level), []).append(op)
    return groups


def _signature(inst: InstructionSpec, level: ReductionLevel):
    # Keys within one role are distinct after grouping, so comparing the
    # sorted key lists is the one-to-one correspondence check.
    src = sorted(_group(inst.sources, level))
    dst = sorted(_group(inst.dests, level))
    return (inst.depth, tuple(src), tuple(dst))


def reduce(isa: InstructionSet, level: ReductionLevel) -> ReducedSet:
    by_sig: dict[tuple, list[InstructionSpec]] = {}
    for inst in isa.instructions:
        by_sig.setdefault(_signature(inst, level), []).append(inst)

    classes = []
    for members in by_sig.values():
        rep = members[0]
        src_groups = _group(rep.sources, level)
        dst_groups = _group(rep.dests, level)
        src_members = {k: [] for k in src_groups}
        dst_members = {k: [] for k in dst_groups}
        for inst in members:
            for s in inst.sources:
                src_members[operand_key(s, level)].append((inst.opcode, s.name))
            for d in inst.dests:
                dst_members[operand_key(d, level)].append((inst.opcode, d.name))
        rep_spec = replace(
            rep,
            sources=tuple(ops[0] for ops in src_groups.values()),
            dests=tuple(ops[0] for ops in dst_groups.values()),
        )
        classes.append(InstructionClass(
            representative=rep_spec,
            members=tuple(i.opcode for i in members),
            sources=tuple(OperandClass("src", k, tuple(v)) for k, v in src_members.items()),
            dests=tuple(OperandClass("dst", k, tuple(v)) for k, v in dst_members.items()),
        ))
    return ReducedSet(level, tuple(classes), isa)


def expand(records: list[HazardRecord], reduced: ReducedSet) -> list[HazardRecord]:
    """Replace class-level names by every concrete member combination.

    Output is in canonical order over ``reduced.origin``.
    """
    out = []
    for r in records:
        try:
            older_cls = reduced.get(r.older[0])
            newer_cls = reduced.get(r.newer[0])
            older_ops = older_cls.operand_class(r.older[1])
            newer_ops = newer_cls.operand_class(r.newer[1])
        except KeyError as exc:
            raise ValueError(f"record references unknown class: {exc}") from None
        for oi in older_cls.members:
            for ni in newer_cls.members:
                for oo in older_ops.names_for(oi):
                    for no in newer_ops.names_for(ni):
                        out.append(replace(
                            r,
                            older=(oi, oo),
                            newer=(ni, no),
                            stalled=ni if r.stalled is not None else None,
                        ))
    return sort_records(out, reduced.origin)
