"""
Tests for finite-window sets, sumsets, densities and progressions.
"""
from fractions import Fraction

import numpy as np
import pytest

from partreg_core.sumsets.density import dyadic_dstar, window_density
from partreg_core.sumsets.progressions import find_progression
from partreg_core.sumsets.windowset import (
    WindowSet,
    difference,
    iterate_sumset,
    sumset,
    sumset_layers,
)
from partreg_core.validation import ContractViolation, Inconclusive, WindowTooSmall


def test_from_members_and_contains():
    """Test membership of a small finite set."""
    s = WindowSet.from_members([1, 4, 7], 0, 10)

    assert s.contains(4)
    assert not s.contains(5)
    assert not s.contains(42)
    assert s.members().tolist() == [1, 4, 7]
    assert s.count() == 3
    assert s.is_finite


def test_from_members_outside_window():
    """Test that members must lie in the window."""
    with pytest.raises(ContractViolation):
        WindowSet.from_members([11], 0, 10)


def test_residue_class():
    """Test the residue class constructor and its gcd."""
    s = WindowSet.residue_class(3, 0, -9, 9)

    assert s.members().tolist() == [-9, -6, -3, 0, 3, 6, 9]
    assert s.element_gcd() == 3


def test_sumset_small():
    """Test {0, 1} + {0, 1} = {0, 1, 2}."""
    s = WindowSet.from_members([0, 1], 0, 1)
    total = sumset(s, s)

    assert total.members().tolist() == [0, 1, 2]
    assert (total.certified_lo, total.certified_hi) == (0, 2)


def test_difference():
    """Test {1, 3} - {1, 3} = {-2, 0, 2}."""
    s = WindowSet.from_members([1, 3], 1, 3)

    assert difference(s, s).members().tolist() == [-2, 0, 2]


def test_sumset_scale_mismatch():
    """Test that sets at different levels cannot be added."""
    a = WindowSet.from_members([1], 0, 2, scale=0)
    b = WindowSet.from_members([1], 0, 2, scale=1)

    with pytest.raises(ContractViolation):
        sumset(a, b)


def test_sumset_fft_matches_residues():
    """Test the FFT path on two long residue classes."""
    s = WindowSet.residue_class(3, 0, 0, 5000)
    total = sumset(s, s)
    sums = np.arange(0, 10001)
    expected = (np.mod(sums, 3) == 0) & (sums <= 9996)

    assert np.array_equal(total.bits, expected)


def test_sumset_certified_region_with_open_support():
    """Test that a set with unknown members outside its window shrinks the certified region."""
    finite = WindowSet.from_members(range(0, 6), 0, 5)
    window = WindowSet(0, -10, np.ones(21, dtype=bool), -10, 10, None, None)
    total = sumset(finite, window)

    assert (total.lo, total.hi) == (-10, 15)
    assert (total.certified_lo, total.certified_hi) == (-5, 10)


def test_sumset_of_two_open_sets_starves():
    """Test that two sets with open support leave no certified region."""
    window = WindowSet(0, -10, np.ones(21, dtype=bool), -10, 10, None, None)

    with pytest.raises(WindowTooSmall):
        sumset(window, window)


def test_iterate_sumset_and_layers():
    """Test kS for S = {0, 1}."""
    s = WindowSet.from_members([0, 1], 0, 1)

    assert iterate_sumset(s, 5).members().tolist() == list(range(6))
    layers = sumset_layers(s, 3)
    assert [layer.count() for layer in layers] == [2, 3, 4]
    with pytest.raises(ContractViolation):
        iterate_sumset(s, 0)


def test_negate_and_translate():
    """Test the reflection and shift transformations."""
    s = WindowSet.from_members([1, 2], 0, 3)

    assert s.negate().members().tolist() == [-2, -1]
    assert s.translate(5).members().tolist() == [6, 7]


def test_embed_preserves_rationals():
    """Test that embedding into the next level doubles numerators."""
    s = WindowSet.from_members([1, 3], 1, 3)
    finer = s.embed()

    assert finer.scale == 1
    assert finer.members().tolist() == [2, 6]


def test_slice_bits_outside_certified():
    """Test that reading past the certified region is inconclusive."""
    s = WindowSet.from_members([1], 0, 5)

    with pytest.raises(WindowTooSmall):
        s.slice_bits(0, 6)


def test_window_density_full_and_evens():
    """Test the upper-density proxy."""
    full = WindowSet.from_members(range(1, 11), 1, 10)
    evens = WindowSet.residue_class(2, 0, 1, 10)

    assert window_density(full) == Fraction(1)
    assert window_density(evens) == Fraction(1, 2)


def test_window_density_needs_positive_numbers():
    """Test that a window of non-positive numerators is rejected."""
    with pytest.raises(ContractViolation):
        window_density(WindowSet.from_members([-1], -5, 0))


def test_dyadic_dstar_contiguous_levels():
    """Test d* over contiguous levels and the contiguity check."""
    levels = [WindowSet.residue_class(2, 0, 1, 100, scale=j) for j in range(4)]

    assert dyadic_dstar(levels) == Fraction(1, 2)
    with pytest.raises(ContractViolation):
        dyadic_dstar([levels[0], levels[2]])


def test_find_progression():
    """Test the least homogeneous progression inside a set."""
    multiples = WindowSet.from_members(range(3, 101, 3), 1, 100)

    witness = find_progression(multiples, 4)
    assert witness.d == 3
    assert witness.numerators() == [3, 6, 9, 12]

    scaled = find_progression(multiples, 4, m=2)
    assert scaled.step == 6
    assert scaled.to_dict()["step"] == 6


def test_find_progression_missing():
    """Test that an absent progression is inconclusive."""
    with pytest.raises(Inconclusive):
        find_progression(WindowSet.from_members([1], 1, 10), 2)


def _open_prefix(bits, width):
    """The first `width` numerators of a set in N whose members continue past the window."""
    return WindowSet(0, 1, bits[:width], 1, width, 1, None)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_certified_region_agrees_with_larger_window(k):
    """Test that a larger window reproduces kS bit-for-bit on the smaller certified region."""
    rng = np.random.default_rng(100 + k)
    bits = rng.random(900) < 0.3

    small = iterate_sumset(_open_prefix(bits, 300), k)
    large = iterate_sumset(_open_prefix(bits, 900), k)

    assert (small.certified_lo, small.certified_hi) == (k, 300 + k - 1)
    region = (small.certified_lo, small.certified_hi)
    assert np.array_equal(small.slice_bits(*region), large.slice_bits(*region))


def test_certified_region_matches_direct_sums():
    """Test 2S on the certified region against all pairwise sums."""
    rng = np.random.default_rng(17)
    bits = rng.random(200) < 0.25
    members = (np.flatnonzero(bits) + 1).tolist()
    sums = {a + b for a in members for b in members}

    total = sumset(_open_prefix(bits, 200), _open_prefix(bits, 200))

    for t in range(total.certified_lo, total.certified_hi + 1):
        assert total.contains(t) == (t in sums)
