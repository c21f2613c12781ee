from __future__ import annotations

import pytest

from pipehazard import hazards
from pipehazard.cli import main

from .conftest import MIPS5, RAW_SAMPLE, WRITE_SAMPLE


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_ok(capsys):
    assert run(capsys, "validate", RAW_SAMPLE) == (0, "", "")


def test_validate_inverted_interval(capsys, tmp_path):
    p = tmp_path / "bad.isa"
    p.write_text("instruction x depth=5\n  dst d write=2 first_avail=3 last_avail=2\nend\n")
    code, out, err = run(capsys, "validate", p)
    assert code == 1 and out == ""
    lines = err.splitlines()
    assert any(line.startswith("error:2:") and "inverted" in line for line in lines)


def test_validate_warning_keeps_exit_zero(capsys, tmp_path):
    p = tmp_path / "warn.isa"
    p.write_text("instruction x depth=5\n  src s read=5 first_needed=1 last_needed=2\nend\n")
    code, out, err = run(capsys, "validate", p)
    assert code == 0
    assert err == "warning:2:read stage outside needed interval\n"


def test_validate_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "validate", tmp_path / "nope.isa")
    assert code == 2 and "cannot read" in err


def test_validate_empty_file_is_fine(capsys, tmp_path):
    p = tmp_path / "empty.isa"
    p.write_text("")
    assert run(capsys, "validate", p)[0] == 0


def test_reduce_raw(capsys):
    code, out, _ = run(capsys, "reduce", RAW_SAMPLE, "--level", "raw")
    assert code == 0
    assert out.splitlines()[0] == "level raw: 2 instruction class(es) from 2 instruction(s)"
    assert "  src s1 key=(1) members: inst2.s1" in out
    assert "  dst d1 key=(3,4) members: inst1.d1" in out


def test_reduce_duplicate(capsys, tmp_path):
    p = tmp_path / "dup.isa"
    block = RAW_SAMPLE.read_text().split("instruction inst2")[0]
    p.write_text(block + block.replace("inst1", "copy"))
    code, out, _ = run(capsys, "reduce", p, "--level", "full")
    assert code == 0
    assert "class inst1 depth=5 members: inst1, copy" in out


def test_reduce_empty_set(capsys, tmp_path):
    p = tmp_path / "empty.isa"
    p.write_text("# nothing\n")
    code, _, err = run(capsys, "reduce", p)
    assert code == 1 and "empty" in err


def test_hazards_waw_table(capsys):
    code, out, _ = run(capsys, "hazards", WRITE_SAMPLE, "--type", "waw", "--format", "table")
    assert code == 0
    assert "inst1(1).d2 = inst1(2).d1 | (1,2)  | inst1(2)      | 1" in out
    assert out.count(" | -      | -") == 3


def test_hazards_raw_csv(capsys):
    code, out, _ = run(capsys, "hazards", RAW_SAMPLE, "--type", "raw", "--pair", "inst1,inst2", "--format", "csv")
    assert code == 0
    assert len(out.splitlines()) == 13


@pytest.mark.parametrize("path", [RAW_SAMPLE, WRITE_SAMPLE, MIPS5])
@pytest.mark.parametrize("fmt", ["table", "csv"])
def test_hazards_no_reduce_identical(capsys, path, fmt):
    a = run(capsys, "hazards", path, "--format", fmt)
    b = run(capsys, "hazards", path, "--format", fmt, "--no-reduce")
    assert a == b and a[0] == 0


def test_hazards_bad_pair(capsys):
    assert run(capsys, "hazards", RAW_SAMPLE, "--pair", "inst1,nope")[0] == 2
    assert run(capsys, "hazards", RAW_SAMPLE, "--type", "rar")[0] == 2


def test_diagram_raw(capsys):
    code, out, _ = run(capsys, "diagram", RAW_SAMPLE, "--older", "inst1", "--newer", "inst2",
                       "--type", "raw", "--dst", "d1", "--src", "s1")
    assert code == 0
    assert ">  1 | . S F F o" in out


def test_diagram_waw(capsys):
    code, out, _ = run(capsys, "diagram", WRITE_SAMPLE, "--older", "inst1", "--newer", "inst1",
                       "--type", "waw", "--dst", "d2", "--dst2", "d1")
    assert code == 0
    grid = [line for line in out.splitlines() if " | " in line]
    assert "".join(grid).count("S") == 1 and "F" not in "".join(grid)


def test_diagram_unknown_operand(capsys):
    code, _, err = run(capsys, "diagram", RAW_SAMPLE, "--older", "inst1", "--newer", "inst2",
                       "--type", "raw", "--dst", "d9", "--src", "s1")
    assert code == 2 and "d9" in err


def test_verify_files(capsys):
    code, out, _ = run(capsys, "verify", RAW_SAMPLE, WRITE_SAMPLE, MIPS5)
    assert code == 0
    assert out.strip() == "verify: 3 file(s): 0 mismatch(es)"


def test_verify_fuzz_small(capsys):
    code, out, _ = run(capsys, "verify", "--fuzz", "--samples", "50", "--seed", "7")
    assert code == 0 and "seed=7" in out


def test_verify_usage(capsys):
    assert run(capsys, "verify")[0] == 2
    assert run(capsys, "verify", RAW_SAMPLE, "--fuzz")[0] == 2


def test_verify_detects_corrupted_rules(capsys, monkeypatch):
    original = hazards.raw_hazards

    def off_by_one(*args):
        recs = original(*args)
        return recs[:-1]

    monkeypatch.setattr(hazards, "raw_hazards", off_by_one)
    code, out, _ = run(capsys, "verify", RAW_SAMPLE)
    assert code == 3
    assert "MISMATCH" in out and "oracle only: RAW inst1.d1 = inst2.s1 hazard=(1,4)" in out


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "pipehazard", "validate", str(RAW_SAMPLE)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
