"""
Tests for extension witnesses and the constructive solver.
"""
from fractions import Fraction

import numpy as np
import pytest

from partreg_core.cli.selftest import random_sequence
from partreg_core.colouring.rules import parse_colouring
from partreg_core.config import EngineConfig
from partreg_core.model.systems import CoefficientSequence, SystemFamily, x_name, z_name
from partreg_core.reasoning.extension import (
    class_layers,
    difference_witness,
    peel,
    single_witness,
)
from partreg_core.reasoning.solver import (
    recheck_trace,
    solve,
    solve_system_a,
    solve_system_c,
    target_values,
)
from partreg_core.sumsets.windowset import WindowSet
from partreg_core.validation import ContractViolation, InternalError


@pytest.fixture
def small_config():
    """Engine configuration sized for unit tests."""
    return EngineConfig(
        window=3000,
        levels=8,
        dyadic_window=600,
        stabilize_window=1500,
        extension_window=1500,
        k_max=16,
        l_cap=6,
    )


def _interval_layers(k):
    return class_layers(WindowSet.from_members(range(1, 11), 1, 10), k)


def test_difference_witness():
    """Test the least v in 2A with v + 3 in 2A for A = [1..10]."""
    xs, zs = difference_witness(_interval_layers(2), 2, 3)

    assert xs == [1, 1]
    assert zs == [1, 4]
    assert sum(zs) - sum(xs) == 3


def test_single_witness():
    """Test the least z in A with z - 3 in 2A."""
    xs, z = single_witness(_interval_layers(2), 2, 3)

    assert z == 5
    assert xs == [1, 1]


def test_witness_index_range():
    """Test that k must be covered by the layers."""
    with pytest.raises(ContractViolation):
        difference_witness(_interval_layers(2), 3, 1)


def test_peel_rejects_non_members():
    """Test that peeling a value outside jA is an internal error."""
    with pytest.raises(InternalError):
        peel(_interval_layers(2), 1, 2)


def test_class_layers_need_finite_prefix():
    """Test that open-ended windows are rejected for extension search."""
    window = WindowSet(0, 1, np.ones(10, dtype=bool), 1, 10, None, None)
    with pytest.raises(ContractViolation):
        class_layers(window, 2)


def test_target_values():
    """Test the right-hand targets c(k) * y."""
    assert target_values(SystemFamily.SYSTEM_B, 2, Fraction(4)) == [
        (1, Fraction(2)),
        (2, Fraction(1)),
    ]


def test_system_a_residue_colouring(small_config):
    """Test System A on the mod 3 colouring of [1..3000]."""
    col = parse_colouring("mod:3", 3000)
    report, trace = solve_system_a(col, 3, config=small_config)

    assert report.check.all_zero
    assert report.colour == 1
    assert trace.m == 3
    assert trace.K == 2
    assert trace.p_rows == 1
    assert [w.k for w in trace.extensions] == [2, 3]
    assert report.assignment["y"] == 3
    assert all(col.colour_of(v) == report.colour for v in report.assignment.values.values())
    assert recheck_trace(col, trace, small_config) == []


def test_system_c_single_colour(small_config):
    """Test System C when one colour covers the window."""
    col = parse_colouring("mod:1", 2000)
    report, trace = solve_system_c(col, 2, config=small_config)

    values = report.assignment
    assert (values["y"], values[x_name(1, 1)], values[z_name(1)]) == (1, 1, 3)
    assert (values[x_name(2, 1)], values[x_name(2, 2)], values[z_name(2)]) == (1, 1, 6)
    assert trace.recursion_depth == 0


def test_system_c_recurses_on_parity(small_config):
    """Test that odd numbers missing 2Z send System C into the induced colouring."""
    col = parse_colouring("mod:2", 2000)
    report, trace = solve_system_c(col, 2, config=small_config)

    assert trace.recursion_depth == 1
    assert trace.recursion_moduli == [2]
    assert trace.child is not None
    assert report.check.all_zero
    assert all(v % 2 == 0 for v in report.assignment.values.values())
    assert recheck_trace(col, trace, small_config) == []


def test_system_c_residue_colouring_recurses_once(small_config):
    """Test that classes 1 and 2 mod 3 missing 3Z send mod 3 into 3N exactly once."""
    col = parse_colouring("mod:3", 3000)
    report, trace = solve_system_c(col, 2, config=small_config)

    assert trace.recursion_depth == 1
    assert trace.recursion_moduli == [3]
    assert trace.child.recursion_depth == 0
    assert (report.assignment["y"], report.assignment[z_name(1)]) == (3, 9)
    assert recheck_trace(col, trace, small_config) == []


def test_system_b_dyadic_residues(small_config):
    """Test System B on the mod 3 colouring of dyadic levels 0..7."""
    col = parse_colouring("mod:3", small_config.dyadic_window, max_level=small_config.levels - 1)
    report, trace = solve(SystemFamily.SYSTEM_B, col, 2, config=small_config)

    assert report.check.all_zero
    assert all(
        v.denominator <= 2 ** (small_config.levels - 1) for v in report.assignment.values.values()
    )
    assert trace.levels
    assert recheck_trace(col, trace, small_config) == []


def test_solve_rejects_other_families(small_config):
    """Test that only Systems A, B and C have a solver."""
    col = parse_colouring("mod:2", 100)

    with pytest.raises(ContractViolation):
        solve(SystemFamily.DIFFERENCE, col, 2, config=small_config)


def test_system_a_needs_integer_colouring(small_config):
    """Test that System A refuses a dyadic colouring."""
    col = parse_colouring("mod:2", 100, max_level=2)

    with pytest.raises(ContractViolation):
        solve_system_a(col, 2, config=small_config)


def test_trace_serializes(small_config):
    """Test that a solver trace serializes to plain data."""
    col = parse_colouring("mod:1", 2000)
    _, trace = solve_system_c(col, 2, config=small_config)
    data = trace.to_dict()

    assert data["family"] == "SystemC"
    assert data["p_solution"]["y"] == "1"
    assert data["extensions"][0]["zs"] == ["6"]


def test_system_a_signed_coefficients(small_config):
    """Test System A with negative y-coefficients."""
    col = parse_colouring("mod:3", 3000)
    seq = CoefficientSequence.custom([-2, 3, -8])
    report, trace = solve_system_a(col, 3, seq, config=small_config)

    assert report.check.all_zero
    assert report.assignment["y"] == 3
    assert (report.assignment[x_name(1, 1)], report.assignment[z_name(1, 1)]) == (9, 3)
    assert [w.target for w in trace.extensions] == [9, -24]
    assert recheck_trace(col, trace, small_config) == []


def test_random_coefficient_sequences_stay_in_range():
    """Test that drawn coefficients are non-zero, signed and bounded by 2^k."""
    rng = np.random.default_rng(0)
    seqs = [random_sequence(rng, 3) for _ in range(200)]
    values = [(k, seq.c(k)) for seq in seqs for k in (1, 2, 3)]

    assert all(c != 0 and abs(c) <= 2**k for k, c in values)
    assert any(c < 0 for _, c in values)
    assert {c for k, c in values if k == 1} == {-2, -1, 1, 2}


def test_system_a_random_coefficient_sequences(small_config):
    """Test System A on the mod 3 colouring for several random sequences."""
    rng = np.random.default_rng(small_config.seed)
    col = parse_colouring("mod:3", 3000)
    for _ in range(5):
        seq = random_sequence(rng, 3)
        report, trace = solve_system_a(col, 3, seq, config=small_config)

        assert report.check.all_zero
        assert all(col.colour_of(v) == report.colour for v in report.assignment.values.values())
        assert recheck_trace(col, trace, small_config) == []
