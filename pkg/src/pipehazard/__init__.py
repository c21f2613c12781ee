"""Systematic enumeration of data hazards in a pipelined instruction set."""
from .equivalence import ReducedSet, ReductionLevel, expand, operand_key, reduce
from .hazards import enumerate_all, raw_hazards, war_hazards, waw_hazards
from .isa import (
    DestOperand,
    Diagnostic,
    InstructionSet,
    InstructionSpec,
    ISAParseError,
    SourceOperand,
    all_coupled_sequences,
    coupled_sequence,
    execution_sequence,
    load,
    parse_instruction_set,
    validate,
)
from .records import HazardRecord, HazardType, Resolution
from .simulate import Binding, oracle_enumerate, replay_with_resolution, simulate_pair

__version__ = "0.1.0"
