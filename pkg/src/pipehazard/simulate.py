"""Cycle-by-cycle reference model for two instructions in flight.

The older instruction enters stage 1 at cycle 0 and advances one stage per
cycle.  The newer one enters ``gap`` cycles later and advances one stage per
cycle unless a stall is scheduled, in which case it holds its stage while the
older one keeps moving.  On every cycle where the newer instruction is about
to leave its critical stage, the hazard predicate is evaluated straight from
the operand intervals:

* RAW  - consumer leaving ``last_needed``; producer before ``first_avail``
  means the value does not exist yet, inside ``[first_avail, last_avail]``
  means it can be bypassed, past ``last_avail`` it is in the register file.
* WAR  - writer leaving ``write`` while the reader has not gone past ``read``.
* WAW  - second writer leaving ``write`` while the first has not gone past
  its own ``write``.

None of the enumeration formulas are used here; stall counts come from
replaying the pair with more and more stall cycles.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .isa import DestOperand, InstructionSet, InstructionSpec, SourceOperand
from .records import ALL_TYPES, HazardRecord, HazardType, Resolution, sort_records

STALL_NEEDED = "RAW-stall-needed"
FORWARD_POSSIBLE = "RAW-forward-possible"
WAR_VIOLATION = "WAR-violation"
WAW_VIOLATION = "WAW-violation"
BLOCKING = frozenset({STALL_NEEDED, WAR_VIOLATION, WAW_VIOLATION})


@dataclass(frozen=True)
class Binding:
    """Which operand of each instruction is assumed to name the same datum."""

    older_operand: str
    newer_operand: str
    type: HazardType


@dataclass(frozen=True)
class CycleState:
    cycle: int
    newer_stage: int
    older_stage: int
    held: bool


@dataclass(frozen=True)
class SimEvent:
    cycle: int
    newer_stage: int
    older_stage: int
    event: str
    detail: str


@dataclass(frozen=True)
class SimTimeline:
    gap: int
    stall_schedule: Mapping[int, int]
    states: tuple[CycleState, ...]
    events: tuple[SimEvent, ...] = field(default=())

    @property
    def blocking(self) -> list[SimEvent]:
        return [e for e in self.events if e.event in BLOCKING]

    def pair_at(self, cycle: int) -> tuple[int, int] | None:
        for s in self.states:
            if s.cycle == cycle:
                return (s.newer_stage, s.older_stage)
        return None


def _resolve(older: InstructionSpec, newer: InstructionSpec, binding: Binding):
    t = binding.type
    try:
        if t is HazardType.RAW:
            return older.dest(binding.older_operand), newer.source(binding.newer_operand)
        if t is HazardType.WAR:
            return older.source(binding.older_operand), newer.dest(binding.newer_operand)
        return older.dest(binding.older_operand), newer.dest(binding.newer_operand)
    except KeyError as exc:
        raise ValueError(f"invalid binding for {t.value}: {exc}") from None


def _walk(older: InstructionSpec, newer: InstructionSpec, gap: int,
          stalls: Mapping[int, int]) -> list[CycleState]:
    """Stage pairs for every cycle where both instructions are in flight."""
    states = []
    cycle = gap
    n_stage = 1
    hold = 0
    while True:
        o_stage = cycle + 1
        if o_stage > older.depth or n_stage > newer.depth:
            break
        hold += stalls.get(cycle, 0)
        held = hold > 0
        states.append(CycleState(cycle, n_stage, o_stage, held))
        if held:
            hold -= 1
        else:
            n_stage += 1
        cycle += 1
    return states


def simulate_pair(older: InstructionSpec, newer: InstructionSpec, gap: int,
                  binding: Binding, stalls: Mapping[int, int] | None = None) -> SimTimeline:
    if gap < 1:
        raise ValueError(f"gap must be >= 1, got {gap}")
    stalls = dict(stalls or {})
    a, b = _resolve(older, newer, binding)
    states = _walk(older, newer, gap, stalls)
    detail = f"{older.opcode}.{a.name}/{newer.opcode}.{b.name}"
    events = []
    for st in states:
        if st.held:
            continue
        n, o = st.newer_stage, st.older_stage
        kind = None
        if binding.type is HazardType.RAW:
            assert isinstance(a, DestOperand) and isinstance(b, SourceOperand)
            if n == b.last_needed:
                if o < a.first_avail:
                    kind = STALL_NEEDED
                elif o <= a.last_avail:
                    kind = FORWARD_POSSIBLE
        elif binding.type is HazardType.WAR:
            if n == b.write and o <= a.read:
                kind = WAR_VIOLATION
        else:
            if n == b.write and o <= a.write:
                kind = WAW_VIOLATION
        if kind is not None:
            events.append(SimEvent(st.cycle, n, o, kind, detail))
    return SimTimeline(gap, stalls, tuple(states), tuple(events))


def stall_at_entry(gap: int, cycles: int) -> dict[int, int]:
    """Stall schedule holding the newer instruction at stage 1."""
    return {gap: cycles}


def replay_with_resolution(older: InstructionSpec, newer: InstructionSpec, gap: int,
                           binding: Binding, record: HazardRecord,
                           stall_cycles: int | None = None) -> SimTimeline:
    """Re-run the pair with the record's resolution applied.

    Forwards do not change timing.  Stalls hold the newer instruction at the
    record's ``apply_at`` point; *stall_cycles* overrides the count (used to
    probe minimality).
    """
    if record.gap != gap:
        raise ValueError(f"record gap {record.gap} does not match gap {gap}")
    if not record.resolution.is_stall:
        return simulate_pair(older, newer, gap, binding)
    base = simulate_pair(older, newer, gap, binding)
    cycle = next((s.cycle for s in base.states
                  if (s.newer_stage, s.older_stage) == record.apply_at), None)
    if cycle is None:
        raise ValueError(f"apply_at {record.apply_at} is not on the coupled sequence for gap {gap}")
    count = record.resolution.stall_cycles if stall_cycles is None else stall_cycles
    return simulate_pair(older, newer, gap, binding, {cycle: count} if count else {})


def _bindings(older: InstructionSpec, newer: InstructionSpec, t: HazardType) -> list[Binding]:
    if t is HazardType.RAW:
        return [Binding(d.name, s.name, t) for d in older.dests for s in newer.sources]
    if t is HazardType.WAR:
        return [Binding(s.name, d.name, t) for s in older.sources for d in newer.dests]
    return [Binding(d.name, e.name, t) for d in older.dests for e in newer.dests]


def _min_stall(older, newer, gap, binding) -> int:
    for count in range(1, older.depth + 1):
        tl = simulate_pair(older, newer, gap, binding, stall_at_entry(gap, count))
        if not tl.blocking:
            return count
    raise RuntimeError("stall search did not terminate")  # older retires by then


def oracle_pair(older: InstructionSpec, newer: InstructionSpec,
                binding: Binding) -> list[HazardRecord]:
    out = []
    for gap in range(1, older.depth):
        tl = simulate_pair(older, newer, gap, binding)
        for ev in tl.events:
            pair = (ev.newer_stage, ev.older_stage)
            if ev.event == FORWARD_POSSIBLE:
                out.append(HazardRecord(
                    binding.type, (older.opcode, binding.older_operand),
                    (newer.opcode, binding.newer_operand), pair, gap,
                    Resolution.forward(ev.older_stage, ev.newer_stage), pair,
                ))
            else:
                count = _min_stall(older, newer, gap, binding)
                out.append(HazardRecord(
                    binding.type, (older.opcode, binding.older_operand),
                    (newer.opcode, binding.newer_operand), pair, gap,
                    Resolution.stall(count), tl.pair_at(gap), newer.opcode,
                ))
    return out


def oracle_enumerate(isa: InstructionSet, types: Iterable[HazardType] = ALL_TYPES) -> list[HazardRecord]:
    """Brute-force sweep over every ordered pair, gap and operand binding."""
    types = list(dict.fromkeys(types))
    out = []
    for older in isa.instructions:
        for newer in isa.instructions:
            for t in types:
                for b in _bindings(older, newer, t):
                    out.extend(oracle_pair(older, newer, b))
    return sort_records(out, isa)
