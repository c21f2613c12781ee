from __future__ import annotations

from pathlib import Path

import pytest

from pipehazard.isa import load

ISA_DIR = Path(__file__).resolve().parent.parent / "isa"
RAW_SAMPLE = ISA_DIR / "raw_sample.isa"
WRITE_SAMPLE = ISA_DIR / "write_sample.isa"
MIPS5 = ISA_DIR / "mips5.isa"


@pytest.fixture
def raw_isa():
    return load(RAW_SAMPLE)


@pytest.fixture
def write_isa():
    return load(WRITE_SAMPLE)


@pytest.fixture
def mips_isa():
    return load(MIPS5)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in rep.nodeid and rep.when == "call":
                lines.append((rep.nodeid.split("::")[-1], outcome))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, outcome in sorted(lines):
            terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
