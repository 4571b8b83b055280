"""
Tests for set specs and spec-driven stabilization runs.
"""
import pytest

from partreg_core.ingestion.specs import (
    parse_set,
    parse_set_levels,
    stabilize_spec,
)
from partreg_core.sumsets.stabilize import CosetReport, DyadicStabilizationReport
from partreg_core.validation import ContractViolation


@pytest.mark.parametrize(
    "spec,lo,hi,expected",
    [
        ("mod:3,1", 1, 10, [1, 4, 7, 10]),
        ("mod:3,-1", 1, 10, [2, 5, 8]),
        ("expr:square", 0, 20, [0, 1, 4, 9, 16]),
        ("expr:odd & ~square", 1, 10, [3, 5, 7]),
        ("expr:range(2,4) | mod(5,0)", 1, 10, [2, 3, 4, 5, 10]),
        ("expr:even | odd & square", 1, 10, [1, 2, 4, 6, 8, 9, 10]),
        ("expr:~(even | square)", 1, 10, [3, 5, 7]),
        ("expr:all", -2, 2, [-2, -1, 0, 1, 2]),
    ],
)
def test_parse_set(spec, lo, hi, expected):
    """Test residue specs and boolean formulas."""
    assert parse_set(spec, lo, hi).members().tolist() == expected


def test_parse_set_from_file(tmp_path):
    """Test reading members from a file, ignoring those outside the window."""
    path = tmp_path / "members.txt"
    path.write_text("2\n# skip\n3\n5\n99\n", encoding="utf-8")

    assert parse_set(f"file:{path}", 1, 10).members().tolist() == [2, 3, 5]


@pytest.mark.parametrize(
    "spec",
    ["mod:3", "mod:0,1", "expr:foo", "expr:mod(0,1)", "expr:(odd", "bogus:1"],
)
def test_parse_set_rejects_bad_specs(spec):
    """Test malformed set specs."""
    with pytest.raises(ContractViolation):
        parse_set(spec, 1, 10)


def test_parse_set_on_dyadic_level():
    """Test that a level-1 set is decided by the lowest-terms numerator."""
    assert parse_set("mod:3,0", 1, 12, scale=1).members().tolist() == [3, 6, 9, 12]
    assert parse_set("expr:odd", 1, 6, scale=1).members().tolist() == [1, 2, 3, 5, 6]


def test_parse_set_levels():
    """Test per-level sets."""
    levels = parse_set_levels("mod:3,0", 30, 3)

    assert [level.scale for level in levels] == [0, 1, 2]
    with pytest.raises(ContractViolation):
        parse_set_levels("mod:3,0", 30, 0)


def test_stabilize_spec_difference():
    """Test A - A for A = 1 mod 3."""
    report = stabilize_spec("mod:3,1", 3000)

    assert report.m == 3
    assert report.K == 1


def test_stabilize_spec_symmetric():
    """Test a symmetric set given on [-W..W]."""
    report = stabilize_spec("expr:mod(5,0) | mod(5,2) | mod(5,3)", 1000, mode="symmetric")

    assert report.m == 1
    assert report.K == 2


def test_stabilize_spec_asymmetric():
    """Test that asymmetric mode returns the coset report."""
    report = stabilize_spec("mod:3,1", 3000, mode="asymmetric", k=2)

    assert isinstance(report, CosetReport)
    assert report.residues == [2]


def test_stabilize_spec_dyadic():
    """Test dyadic mode on multiples of 3."""
    report = stabilize_spec("mod:3,0", 600, mode="dyadic", levels=4)

    assert isinstance(report, DyadicStabilizationReport)
    assert report.m == 3
    assert report.frequency == 4


def test_stabilize_spec_unknown_mode():
    """Test that an unknown mode is rejected."""
    with pytest.raises(ContractViolation):
        stabilize_spec("mod:3,1", 100, mode="sideways")
