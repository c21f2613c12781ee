"""Seeded random instruction sets that satisfy every model invariant."""
from __future__ import annotations

import random
from dataclasses import replace

from .isa import DestOperand, InstructionSet, InstructionSpec, SourceOperand

MAX_INSTRUCTIONS = 4
# chance that a new instruction reuses an earlier one's timing, so the
# equivalence reductions have something to merge
CLONE_PROB = 0.3


def random_source(rng: random.Random, name: str, depth: int) -> SourceOperand:
    fn, ln = sorted((rng.randint(1, depth), rng.randint(1, depth)))
    return SourceOperand(name, rng.randint(1, depth), fn, ln)


def random_dest(rng: random.Random, name: str, depth: int) -> DestOperand:
    la = rng.randint(1, depth)
    return DestOperand(name, rng.randint(1, la), rng.randint(1, la), la)


def random_instruction(rng: random.Random, opcode: str, max_depth: int, max_ops: int) -> InstructionSpec:
    depth = rng.randint(2, max(2, max_depth))
    n_src = rng.randint(0, max_ops)
    n_dst = rng.randint(0, max_ops)
    return InstructionSpec(
        opcode,
        depth,
        tuple(random_source(rng, f"s{i + 1}", depth) for i in range(n_src)),
        tuple(random_dest(rng, f"d{i + 1}", depth) for i in range(n_dst)),
    )


def _clone(rng: random.Random, inst: InstructionSpec, opcode: str) -> InstructionSpec:
    srcs = list(inst.sources)
    dsts = list(inst.dests)
    rng.shuffle(srcs)
    rng.shuffle(dsts)
    return replace(
        inst,
        opcode=opcode,
        sources=tuple(replace(s, name=f"s{i + 1}") for i, s in enumerate(srcs)),
        dests=tuple(replace(d, name=f"d{i + 1}") for i, d in enumerate(dsts)),
    )


def random_instruction_set(rng: random.Random, max_depth: int = 8, max_ops: int = 3,
                           max_instructions: int = MAX_INSTRUCTIONS, name: str = "fuzz") -> InstructionSet:
    insts: list[InstructionSpec] = []
    for i in range(rng.randint(1, max_instructions)):
        opcode = f"i{i}"
        if insts and rng.random() < CLONE_PROB:
            insts.append(_clone(rng, rng.choice(insts), opcode))
        else:
            insts.append(random_instruction(rng, opcode, max_depth, max_ops))
    return InstructionSet(name, tuple(insts))


def samples(count: int, seed: int, max_depth: int = 8, max_ops: int = 3):
    """Yield ``(index, InstructionSet)``; sample *i* depends only on (seed, i)."""
    for i in range(count):
        rng = random.Random(f"{seed}:{i}")
        yield i, random_instruction_set(rng, max_depth, max_ops, name=f"fuzz{seed}_{i}")
