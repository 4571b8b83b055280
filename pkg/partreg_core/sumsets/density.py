"""
Window densities: finite proxies for upper density, per-level density and d*.
"""

from fractions import Fraction
from typing import Sequence

import numpy as np

from partreg_core.sumsets.windowset import WindowSet
from partreg_core.validation import ContractViolation


def window_density(s: WindowSet) -> Fraction:
    """
    Upper-density proxy: max over n in [hi/2, hi] of |S ∩ [1..n]| / n.

    Only positive numerators are counted, so a set in Z has the density of its
    positive part. At scale j the count is taken in 2^-j * [n], i.e. on numerators.

    Args:
        s: Set with hi >= 1

    Returns:
        The achieved maximum as an exact rational

    Raises:
        ContractViolation: If the window holds no positive numerator
    """
    top = s.hi
    if top < 1:
        raise ContractViolation(f"Window [{s.lo}, {s.hi}] has no positive numerators")
    start = max(s.lo, 1)
    counts = np.cumsum(s.bits[start - s.lo :], dtype=np.int64)
    ns = np.arange(start, top + 1, dtype=np.int64)

    first = max(start, (top + 1) // 2)
    counts = counts[first - start :]
    ns = ns[first - start :]
    ratios = counts / ns
    best = float(ratios.max())
    candidates = np.flatnonzero(ratios >= best - 1e-12)
    return max(Fraction(int(counts[i]), int(ns[i])) for i in candidates)


def dyadic_level_density(s: WindowSet) -> Fraction:
    """d_j of a level-j set (window density counted on numerators)."""
    return window_density(s)


def dyadic_dstar(levels: Sequence[WindowSet]) -> Fraction:
    """
    d* proxy: max of d_j over the top half of the provided levels.

    Args:
        levels: Per-level sets for a contiguous range of levels, in order

    Raises:
        ContractViolation: If the list is empty or the levels are not contiguous
    """
    if not levels:
        raise ContractViolation("dyadic_dstar needs at least one level")
    scales = [level.scale for level in levels]
    if scales != list(range(scales[0], scales[0] + len(scales))):
        raise ContractViolation(f"Levels must be contiguous and ordered, got {scales}")
    top_half = levels[len(levels) // 2 :]
    return max(dyadic_level_density(level) for level in top_half)
