"""Instruction-set timing model and the line-oriented ISA description format.

An instruction is described only by *when* it touches its operands: the stage
at which each source is read and the interval in which it can still accept a
value, and the stage at which each destination is written together with the
interval during which the result sits in the pipeline registers.

File format::

    # comment
    instruction add depth=5
      src rs1 read=2 first_needed=2 last_needed=3
      dst rd  write=5 first_avail=4 last_avail=5
    end
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")


@dataclass(frozen=True)
class SourceOperand:
    name: str
    read: int
    first_needed: int
    last_needed: int


@dataclass(frozen=True)
class DestOperand:
    name: str
    write: int
    first_avail: int
    last_avail: int


Operand = SourceOperand | DestOperand


@dataclass(frozen=True)
class InstructionSpec:
    opcode: str
    depth: int
    sources: tuple[SourceOperand, ...] = ()
    dests: tuple[DestOperand, ...] = ()

    def source(self, name: str) -> SourceOperand:
        for s in self.sources:
            if s.name == name:
                return s
        raise KeyError(f"{self.opcode} has no source operand {name!r}")

    def dest(self, name: str) -> DestOperand:
        for d in self.dests:
            if d.name == name:
                return d
        raise KeyError(f"{self.opcode} has no destination operand {name!r}")


@dataclass(frozen=True)
class InstructionSet:
    name: str
    instructions: tuple[InstructionSpec, ...] = ()

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    def get(self, opcode: str) -> InstructionSpec:
        for inst in self.instructions:
            if inst.opcode == opcode:
                return inst
        raise KeyError(f"unknown instruction {opcode!r}")

    def index(self, opcode: str) -> int:
        for i, inst in enumerate(self.instructions):
            if inst.opcode == opcode:
                return i
        raise KeyError(f"unknown instruction {opcode!r}")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    location: str
    message: str
    line: int | None = None

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def __str__(self) -> str:
        where = self.line if self.line is not None else self.location
        return f"{self.severity}:{where}:{self.message}"


class ISAParseError(ValueError):
    """Raised when an ISA description has errors; carries every diagnostic found."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


# --------------------------------------------------------------------------
# validation

def _check_operand(inst: InstructionSpec, op: Operand) -> list[tuple[str, str]]:
    """Return (severity, message) pairs for one operand."""
    out: list[tuple[str, str]] = []
    if isinstance(op, SourceOperand):
        fields = (("read", op.read), ("first_needed", op.first_needed),
                  ("last_needed", op.last_needed))
    else:
        fields = (("write", op.write), ("first_avail", op.first_avail),
                  ("last_avail", op.last_avail))
    in_range = True
    for key, value in fields:
        if not 1 <= value <= inst.depth:
            out.append(("error", f"stage out of range: {key}={value} not in [1, {inst.depth}]"))
            in_range = False
    if isinstance(op, SourceOperand):
        if op.first_needed > op.last_needed:
            out.append(("error", "needed interval inverted: first_needed > last_needed"))
        elif in_range and not op.first_needed <= op.read <= op.last_needed:
            out.append(("warning", "read stage outside needed interval"))
    else:
        if op.first_avail > op.last_avail:
            out.append(("error", "availability interval inverted: first_avail > last_avail"))
        if op.write > op.last_avail:
            out.append(("error", "write stage after last_avail"))
        elif in_range and op.write < op.first_avail:
            out.append(("warning", "write stage before first_avail"))
    return out


def _check_instruction(inst: InstructionSpec) -> list[tuple[str, str | None, str]]:
    """(severity, operand name or None, message) for one instruction."""
    out: list[tuple[str, str | None, str]] = []
    if not IDENT_RE.match(inst.opcode):
        out.append(("error", None, f"invalid opcode identifier {inst.opcode!r}"))
    if inst.depth < 1:
        out.append(("error", None, f"depth must be a positive integer, got {inst.depth}"))
    seen: set[str] = set()
    for op in (*inst.sources, *inst.dests):
        if not IDENT_RE.match(op.name):
            out.append(("error", op.name, f"invalid operand identifier {op.name!r}"))
        if op.name in seen:
            out.append(("error", op.name, f"duplicate operand name {op.name!r}"))
        seen.add(op.name)
        if inst.depth >= 1:
            out.extend((sev, op.name, msg) for sev, msg in _check_operand(inst, op))
    return out


def validate(isa: InstructionSet, require_instructions: bool = False) -> list[Diagnostic]:
    """Check every invariant of the timing model.

    Errors make the set unusable for analysis; warnings flag timing that is
    legal but unusual (a read outside the needed interval, a write before the
    result is available in the pipeline).
    """
    diags: list[Diagnostic] = []
    if require_instructions and not isa.instructions:
        diags.append(Diagnostic("error", isa.name, "instruction set is empty"))
    seen: set[str] = set()
    for inst in isa.instructions:
        if inst.opcode in seen:
            diags.append(Diagnostic("error", inst.opcode, f"duplicate opcode {inst.opcode!r}"))
        seen.add(inst.opcode)
        for sev, opname, msg in _check_instruction(inst):
            loc = inst.opcode if opname is None else f"{inst.opcode}.{opname}"
            diags.append(Diagnostic(sev, loc, msg))
    return diags


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.is_error for d in diags)


# --------------------------------------------------------------------------
# parsing

_SRC_KEYS = ("read", "first_needed", "last_needed")
_DST_KEYS = ("write", "first_avail", "last_avail")


@dataclass
class _Block:
    opcode: str
    depth: int | None
    line: int
    sources: list[SourceOperand] = field(default_factory=list)
    dests: list[DestOperand] = field(default_factory=list)
    lines: dict[str, int] = field(default_factory=dict)


def _kv(token: str) -> tuple[str, str] | None:
    key, sep, value = token.partition("=")
    if not sep or not key or not value:
        return None
    return key, value


def _parse_fields(tokens: list[str], keys: tuple[str, ...], lineno: int,
                  diags: list[Diagnostic]) -> dict[str, int] | None:
    values: dict[str, int] = {}
    ok = True
    for tok in tokens:
        kv = _kv(tok)
        if kv is None:
            diags.append(Diagnostic("error", str(lineno), f"malformed key=value token {tok!r}", lineno))
            ok = False
            continue
        key, raw = kv
        if key not in keys:
            diags.append(Diagnostic("error", str(lineno), f"unknown keyword {key!r}", lineno))
            ok = False
        elif key in values:
            diags.append(Diagnostic("error", str(lineno), f"repeated keyword {key!r}", lineno))
            ok = False
        elif not raw.isdigit():
            diags.append(Diagnostic("error", str(lineno), f"{key} must be a decimal integer, got {raw!r}", lineno))
            ok = False
        else:
            values[key] = int(raw)
    missing = [k for k in keys if k not in values]
    if ok and missing:
        diags.append(Diagnostic("error", str(lineno), f"missing keyword(s): {', '.join(missing)}", lineno))
        ok = False
    return values if ok else None


def parse_with_lines(text: str, name: str = "isa") -> tuple[InstructionSet, dict[str, int], list[Diagnostic]]:
    """Parse *text*; return the set, a location->line map and all diagnostics.

    The set is only meaningful when no diagnostic is an error.  Warnings are
    not produced here; run :func:`validate` for those.
    """
    diags: list[Diagnostic] = []
    blocks: list[_Block] = []
    current: _Block | None = None

    def err(lineno: int, msg: str) -> None:
        diags.append(Diagnostic("error", str(lineno), msg, lineno))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        head, rest = tokens[0], tokens[1:]
        if head == "instruction":
            if current is not None:
                err(current.line, f"missing 'end' for instruction {current.opcode!r}")
                blocks.append(current)
            if not rest or not IDENT_RE.match(rest[0]):
                err(lineno, "expected 'instruction <opcode> depth=<int>'")
                current = _Block("?", None, lineno)
                continue
            current = _Block(rest[0], None, lineno)
            fields = _parse_fields(rest[1:], ("depth",), lineno, diags)
            if fields is not None:
                if fields["depth"] < 1:
                    err(lineno, "depth must be a positive integer")
                else:
                    current.depth = fields["depth"]
        elif head == "end":
            if current is None:
                err(lineno, "'end' without matching 'instruction'")
            elif rest:
                err(lineno, "unexpected tokens after 'end'")
                blocks.append(current)
                current = None
            else:
                blocks.append(current)
                current = None
        elif head in ("src", "dst"):
            if current is None:
                err(lineno, f"'{head}' outside an instruction block")
                continue
            if not rest or not IDENT_RE.match(rest[0]):
                err(lineno, f"expected '{head} <name> key=value ...'")
                continue
            opname = rest[0]
            if opname in current.lines:
                err(lineno, f"duplicate operand name {opname!r}")
                continue
            current.lines[opname] = lineno
            if head == "src":
                f = _parse_fields(rest[1:], _SRC_KEYS, lineno, diags)
                if f is not None:
                    current.sources.append(SourceOperand(opname, f["read"], f["first_needed"], f["last_needed"]))
            else:
                f = _parse_fields(rest[1:], _DST_KEYS, lineno, diags)
                if f is not None:
                    current.dests.append(DestOperand(opname, f["write"], f["first_avail"], f["last_avail"]))
        else:
            err(lineno, f"unknown keyword {head!r}")
    if current is not None:
        err(current.line, f"missing 'end' for instruction {current.opcode!r}")
        blocks.append(current)

    lines: dict[str, int] = {}
    instructions: list[InstructionSpec] = []
    seen: dict[str, int] = {}
    for b in blocks:
        if b.opcode in seen:
            err(b.line, f"duplicate opcode {b.opcode!r}")
            continue
        seen[b.opcode] = b.line
        if b.depth is None:
            continue
        inst = InstructionSpec(b.opcode, b.depth, tuple(b.sources), tuple(b.dests))
        instructions.append(inst)
        lines[b.opcode] = b.line
        for opname, ln in b.lines.items():
            lines[f"{b.opcode}.{opname}"] = ln
        for sev, opname, msg in _check_instruction(inst):
            if sev == "error":
                ln = b.line if opname is None else b.lines[opname]
                err(ln, msg)

    diags.sort(key=lambda d: d.line or 0)
    return InstructionSet(name, tuple(instructions)), lines, diags


def parse_instruction_set(text: str, name: str = "isa") -> InstructionSet:
    """Parse an ISA description, raising :class:`ISAParseError` on any error."""
    isa, _, diags = parse_with_lines(text, name)
    if has_errors(diags):
        raise ISAParseError(diags)
    return isa


def load(path, name: str | None = None) -> InstructionSet:
    from pathlib import Path

    p = Path(path)
    return parse_instruction_set(p.read_text(encoding="utf-8"), name or p.stem)


# --------------------------------------------------------------------------
# execution and coupled sequences

def execution_sequence(inst: InstructionSpec) -> list[int]:
    return list(range(1, inst.depth + 1))


def coupled_sequence(older: InstructionSpec, newer: InstructionSpec, gap: int) -> list[tuple[int, int]]:
    """Stage pairs ``(newer_stage, older_stage)`` while both are in flight.

    *gap* is the number of cycles between the two instructions entering the
    pipeline, so ``older_stage - newer_stage == gap`` for every pair.
    """
    if gap < 1:
        raise ValueError(f"gap must be >= 1, got {gap}")
    last = min(newer.depth, older.depth - gap)
    return [(a, a + gap) for a in range(1, last + 1)]


def all_coupled_sequences(older: InstructionSpec, newer: InstructionSpec) -> list[list[tuple[int, int]]]:
    seqs = (coupled_sequence(older, newer, g) for g in range(1, older.depth))
    return [s for s in seqs if s]
