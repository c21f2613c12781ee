"""Release gate.  Run with pytest, or ``python -m tests.test_acceptance`` for a
one-line PASS/FAIL report per criterion."""
from __future__ import annotations

import contextlib
import io
import tempfile
import time
from pathlib import Path

from pipehazard import fuzz
from pipehazard.cli import main
from pipehazard.hazards import enumerate_all
from pipehazard.isa import load, parse_instruction_set
from pipehazard.records import HazardType
from pipehazard.report import import_csv, parse_diagram_marks, render_isa
from pipehazard.simulate import oracle_enumerate

from .test_simulate import check_stall_minimality

ISA_DIR = Path(__file__).resolve().parent.parent / "isa"
RAW_SAMPLE = ISA_DIR / "raw_sample.isa"
WRITE_SAMPLE = ISA_DIR / "write_sample.isa"


def cli(*argv) -> tuple[int, str]:
    out = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
        code = main([str(a) for a in argv])
    return code, out.getvalue()


def _summary(records):
    out = set()
    for r in records:
        res = r.resolution
        action = ("stall", res.stall_cycles) if res.is_stall else ("forward", res.forward_from, res.forward_to)
        out.add((r.older[1], r.newer[1], r.hazard_pair, action))
    return out


# (older operand, newer operand, hazard pair, resolution)
RAW_GOLDEN = {
    ("d1", "s1", (1, 2), ("stall", 1)),
    ("d1", "s1", (1, 3), ("forward", 3, 1)),
    ("d1", "s1", (1, 4), ("forward", 4, 1)),
    ("d1", "s2", (2, 3), ("forward", 3, 2)),
    ("d1", "s2", (2, 4), ("forward", 4, 2)),
    ("d2", "s1", (1, 2), ("stall", 3)),
    ("d2", "s1", (1, 3), ("stall", 2)),
    ("d2", "s1", (1, 4), ("stall", 1)),
    ("d2", "s1", (1, 5), ("forward", 5, 1)),
    ("d2", "s2", (2, 3), ("stall", 2)),
    ("d2", "s2", (2, 4), ("stall", 1)),
    ("d2", "s2", (2, 5), ("forward", 5, 2)),
}

# WAR summary with the reader (inst2) older and the writer (inst1) newer.
# The printed "(2,5) / 1 stall" row for inst1.d2 = inst2.s1 is left out:
# s1 is read at stage 4, so a writer arriving when the reader is at stage 5
# is already safe.
WAR_GOLDEN = {
    ("s1", "d1", (1, 2), ("stall", 3)),
    ("s1", "d1", (1, 3), ("stall", 2)),
    ("s1", "d1", (1, 4), ("stall", 1)),
    ("s1", "d2", (2, 3), ("stall", 2)),
    ("s1", "d2", (2, 4), ("stall", 1)),
    ("s2", "d1", (1, 2), ("stall", 4)),
    ("s2", "d1", (1, 3), ("stall", 3)),
    ("s2", "d1", (1, 4), ("stall", 2)),
    ("s2", "d1", (1, 5), ("stall", 1)),
    ("s2", "d2", (2, 3), ("stall", 3)),
    ("s2", "d2", (2, 4), ("stall", 2)),
    ("s2", "d2", (2, 5), ("stall", 1)),
}


def test_ac1_raw_golden():
    start = time.perf_counter()
    code, out = cli("hazards", RAW_SAMPLE, "--type", "raw", "--format", "csv")
    elapsed = time.perf_counter() - start
    assert code == 0
    records = import_csv(out)
    assert len(records) == 12
    assert _summary(records) == RAW_GOLDEN
    assert {(r.older[0], r.newer[0]) for r in records} == {("inst1", "inst2")}
    assert all(r.stalled == "inst2" for r in records if r.resolution.is_stall)
    assert elapsed < 1.0


def test_ac2_war_golden():
    code, out = cli("hazards", WRITE_SAMPLE, "--type", "war", "--format", "csv")
    assert code == 0
    records = import_csv(out)
    assert _summary(records) == WAR_GOLDEN
    assert {(r.older[0], r.newer[0], r.stalled) for r in records} == {("inst2", "inst1", "inst1")}
    assert _summary(oracle_enumerate(load(WRITE_SAMPLE), [HazardType.WAR])) == WAR_GOLDEN


def test_ac3_waw_golden():
    code, out = cli("hazards", WRITE_SAMPLE, "--type", "waw", "--format", "csv")
    assert code == 0
    records = import_csv(out)
    assert _summary(records) == {("d2", "d1", (1, 2), ("stall", 1))}
    assert records[0].older[0] == records[0].newer[0] == records[0].stalled == "inst1"

    code, table = cli("hazards", WRITE_SAMPLE, "--type", "waw", "--format", "table")
    rows = [[c.strip() for c in line.split("|")] for line in table.splitlines()[3:] if line.strip()]
    assert rows == [
        ["inst1(1).d1 = inst1(2).d1", "-", "-", "-"],
        ["inst1(1).d1 = inst1(2).d2", "-", "-", "-"],
        ["inst1(1).d2 = inst1(2).d1", "(1,2)", "inst1(2)", "1"],
        ["inst1(1).d2 = inst1(2).d2", "-", "-", "-"],
    ]


def test_ac4_oracle_equivalence_fuzz():
    start = time.perf_counter()
    code, out = cli("verify", "--fuzz", "--samples", 1000, "--seed", 42, "--max-depth", 8, "--max-ops", 3)
    elapsed = time.perf_counter() - start
    assert code == 0, out
    assert "1000 fuzz samples, seed=42" in out and ": 0 mismatch(es)" in out
    assert elapsed < 60.0


def test_ac5_stall_minimality():
    checked = check_stall_minimality(load(RAW_SAMPLE)) + check_stall_minimality(load(WRITE_SAMPLE))
    # raw sample: 6 RAW stalls + 1 WAW (inst1.d2 vs inst1.d1); write sample: 12 WAR + 1 WAW
    assert checked == 6 + 1 + 12 + 1
    for _, isa in fuzz.samples(100, seed=5):
        check_stall_minimality(isa)


def test_ac6_reduction_soundness():
    paths = [RAW_SAMPLE, WRITE_SAMPLE]
    with tempfile.TemporaryDirectory() as tmp:
        for i, isa in fuzz.samples(500, seed=6):
            p = Path(tmp) / f"s{i}.isa"
            p.write_text(render_isa(isa))
            paths.append(p)
        for p in paths:
            for fmt in ("csv", "table"):
                reduced = cli("hazards", p, "--format", fmt)
                plain = cli("hazards", p, "--format", fmt, "--no-reduce")
                assert reduced[0] == 0
                assert reduced == plain, p


def test_ac7_diagram_fidelity():
    code, out = cli("diagram", RAW_SAMPLE, "--older", "inst1", "--newer", "inst2",
                    "--type", "raw", "--dst", "d1", "--src", "s1")
    assert code == 0
    assert parse_diagram_marks(out) == {(1, 2): "S", (1, 3): "F", (1, 4): "F"}
    code, out = cli("diagram", RAW_SAMPLE, "--older", "inst1", "--newer", "inst2",
                    "--type", "raw", "--dst", "d2", "--src", "s2")
    assert code == 0
    assert parse_diagram_marks(out) == {(2, 3): "S", (2, 4): "S", (2, 5): "F"}


def test_ac8_round_trips():
    for _, isa in fuzz.samples(500, seed=8):
        assert parse_instruction_set(render_isa(isa), isa.name) == isa
    for path in (RAW_SAMPLE, WRITE_SAMPLE):
        isa = load(path)
        for t in HazardType:
            records = enumerate_all(isa, [t])
            code, out = cli("hazards", path, "--type", t.value, "--format", "csv")
            assert code == 0
            assert import_csv(out) == records


CRITERIA = [
    ("AC1 RAW golden (12 records, < 1 s)", test_ac1_raw_golden),
    ("AC2 WAR golden (corrected summary, oracle agrees)", test_ac2_war_golden),
    ("AC3 WAW golden (1 record, 3 empty cases)", test_ac3_waw_golden),
    ("AC4 oracle equivalence, 1000 fuzz samples, < 60 s", test_ac4_oracle_equivalence_fuzz),
    ("AC5 stall minimality", test_ac5_stall_minimality),
    ("AC6 reduction soundness (--no-reduce byte-identical)", test_ac6_reduction_soundness),
    ("AC7 diagram fidelity", test_ac7_diagram_fidelity),
    ("AC8 ISA and CSV round-trips", test_ac8_round_trips),
]


if __name__ == "__main__":
    import sys

    failed = 0
    for label, fn in CRITERIA:
        try:
            fn()
            print(f"PASS  {label}")
        except AssertionError as exc:
            failed += 1
            print(f"FAIL  {label}: {exc}")
    sys.exit(1 if failed else 0)
