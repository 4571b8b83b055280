"""
Tests for sumset stabilization.
"""
from fractions import Fraction
from math import ceil

import numpy as np
import pytest

from partreg_core.config import EngineConfig
from partreg_core.sumsets.density import window_density
from partreg_core.sumsets.stabilize import (
    stabilize_asymmetric,
    stabilize_dyadic,
    stabilize_symmetric,
)
from partreg_core.sumsets.windowset import WindowSet, iterate_sumset, sumset
from partreg_core.validation import ContractViolation, Inconclusive


def _symmetric(predicate, radius):
    return WindowSet.from_predicate(predicate, -radius, radius)


def test_symmetric_lattice_is_stable_immediately():
    """Test that 3Z restricted to a window stabilizes at K = 1."""
    s = _symmetric(lambda t: np.mod(t, 3) == 0, 1000)
    report = stabilize_symmetric(s)

    assert report.m == 3
    assert report.K == 1
    assert report.bound_k == 6
    assert report.density == Fraction(1, 3)
    assert report.certified
    assert report.K <= report.bound_k


def test_symmetric_generates_integers():
    """Test that residues {0, 2, 3} mod 5 fill Z after two steps."""
    s = _symmetric(lambda t: np.isin(np.mod(t, 5), [0, 2, 3]), 1000)
    report = stabilize_symmetric(s)

    assert report.m == 1
    assert report.K == 2
    assert report.bound_k == 4
    assert report.certified
    assert report.stable_set is not None
    assert report.stable_set.count() == report.probe_hi - report.probe_lo + 1


def test_symmetric_rejects_asymmetric_set():
    """Test the symmetry precondition."""
    s = WindowSet.from_members([0, 1], -5, 5)

    with pytest.raises(ContractViolation):
        stabilize_symmetric(s)


def test_symmetric_requires_zero():
    """Test that 0 must be a member."""
    s = WindowSet.from_members([-1, 1], -5, 5)

    with pytest.raises(ContractViolation):
        stabilize_symmetric(s)


def test_symmetric_inconclusive_when_k_max_too_small():
    """Test that a slow chain reports Inconclusive instead of guessing."""
    s = WindowSet.from_members([-1, 0, 1], -1000, 1000)
    config = EngineConfig(k_max=5)

    with pytest.raises(Inconclusive):
        stabilize_symmetric(s, config)


def test_asymmetric_single_coset():
    """Test A - kA for A = 1 + 3N: one coset whose residue moves with k."""
    a = WindowSet.residue_class(3, 1, 1, 3000)

    x1, report1 = stabilize_asymmetric(a, k=1)
    assert report1.m == 3
    assert report1.residues == [0]
    assert report1.contains_zero_coset
    assert report1.coset_closed

    x2, report2 = stabilize_asymmetric(a, k=2)
    assert report2.residues == [2]
    assert not report2.contains_zero_coset
    assert report2.anchor == 1
    assert np.array_equal(x2.bits[:-3], x2.bits[3:])


def test_asymmetric_anchor_must_be_member():
    """Test that the anchor has to lie in A."""
    a = WindowSet.residue_class(3, 1, 1, 300)

    with pytest.raises(ContractViolation):
        stabilize_asymmetric(a, anchor=2)


def test_dyadic_levels_agree():
    """Test dyadic stabilization on levels that all hold the even numerators."""
    levels = [WindowSet.residue_class(2, 0, 1, 400, scale=j) for j in range(4)]
    report = stabilize_dyadic(levels)

    assert report.m == 2
    assert report.frequency == 4
    assert report.qualifying_levels == [0, 1, 2, 3]
    assert report.bound_k == 8
    assert report.to_dict()["frequency"] == 4


def test_dyadic_needs_enough_levels():
    """Test that too few qualifying levels are inconclusive."""
    levels = [WindowSet.residue_class(2, 0, 1, 400, scale=j) for j in range(2)]

    with pytest.raises(Inconclusive):
        stabilize_dyadic(levels)


def _random_symmetric(rng, window):
    q = int(rng.integers(1, 4))
    p = float(rng.uniform(0.5, 0.9))
    ts = np.arange(1, window + 1)
    members = ts[(ts % q == 0) & (rng.random(window) < p)]
    both = np.concatenate([-members, [0], members])
    return WindowSet.from_members(both.tolist(), -window, window)


def _random_dense(rng, window):
    q = int(rng.integers(1, 5))
    a = int(rng.integers(0, q))
    p = float(rng.uniform(0.5, 0.9))
    ts = np.arange(1, window + 1)
    members = ts[(ts % q == a) & (rng.random(window) < p)]
    return WindowSet.from_members(members.tolist(), 1, window)


def test_symmetric_random_sets_respect_bound():
    """Test K <= ceil(2/d) + 1 and KS = mZ on random dense symmetric sets."""
    rng = np.random.default_rng(2024)
    for _ in range(8):
        s = _random_symmetric(rng, 3000)
        density = window_density(s)
        report = stabilize_symmetric(s)

        assert report.certified
        assert report.K <= ceil(2 / density) + 1
        stable = iterate_sumset(s, report.K).slice_bits(report.probe_lo, report.probe_hi)
        assert np.array_equal(stable, report.stable_set.bits)


def test_symmetric_stable_set_is_a_subgroup():
    """Test X + X = X and X = -X for X = KS on the probe region."""
    rng = np.random.default_rng(99)
    for _ in range(5):
        s = _random_symmetric(rng, 3000)
        report = stabilize_symmetric(s)
        x = iterate_sumset(s, report.K).slice_bits(report.probe_lo, report.probe_hi)
        probe = WindowSet.finite(x, report.probe_lo)

        assert np.array_equal(x, x[::-1])
        doubled = sumset(probe, probe).slice_bits(report.probe_lo, report.probe_hi)
        assert np.array_equal(doubled, x)


def test_asymmetric_random_sets_are_coset_unions():
    """Test X + mZ = X for X = A - kA on random dense sets."""
    rng = np.random.default_rng(7)
    for _ in range(6):
        a = _random_dense(rng, 3000)
        x, report = stabilize_asymmetric(a)
        m = report.m

        assert report.coset_closed
        assert x.bits.size > m
        assert np.array_equal(x.bits[:-m], x.bits[m:])
