"""
Homogeneous progressions inside a set: the least d with (m*d)*[l] ⊆ good.
"""

from dataclasses import dataclass

import numpy as np

from partreg_core.logging import get_logger
from partreg_core.sumsets.windowset import WindowSet
from partreg_core.validation import ContractViolation, Inconclusive

logger = get_logger(__name__)


@dataclass(frozen=True)
class ProgressionWitness:
    """
    The progression {2^-j * multiplier * d * i : 1 <= i <= l} inside a set.

    Attributes:
        j: Level (0 over Z)
        d: Common difference factor
        l: Length
        multiplier: The m the progression was required to be a multiple of
    """

    j: int
    d: int
    l: int
    multiplier: int = 1

    @property
    def step(self) -> int:
        """Numerator step m*d of the progression at level j."""
        return self.multiplier * self.d

    def numerators(self) -> list:
        return [self.step * i for i in range(1, self.l + 1)]

    def to_dict(self) -> dict:
        return {
            "j": self.j,
            "d": self.d,
            "l": self.l,
            "multiplier": self.multiplier,
            "step": self.step,
        }


def find_progression(good: WindowSet, l: int, m: int = 1) -> ProgressionWitness:
    """
    Least d with (m*d) * [l] inside good, within the certified window.

    Args:
        good: Target set (positive numerators)
        l: Progression length
        m: Required multiplier

    Returns:
        ProgressionWitness at good's scale

    Raises:
        ContractViolation: If l < 1, m < 1 or the window is shorter than m*l
        Inconclusive: If no d fits in the window (reports how many were tried)
    """
    if l < 1 or m < 1:
        raise ContractViolation(f"Need l >= 1 and m >= 1, got l={l}, m={m}")
    top = good.certified_hi
    if top < m * l:
        raise ContractViolation(f"Window ending at {top} is shorter than m*l = {m * l}")
    base = max(good.certified_lo, 1)
    d_max = top // (m * l)
    d_min = -(-base // m)
    if d_min > d_max:
        raise Inconclusive("No progression start lies in the certified region", "progression")

    ds = np.arange(d_min, d_max + 1, dtype=np.int64)
    ok = np.ones(ds.size, dtype=bool)
    for i in range(1, l + 1):
        ok &= good.bits[m * i * ds - good.lo]
        if not ok.any():
            break
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        raise Inconclusive(
            f"No progression (m*d)*[{l}] with m={m} inside the set; tried {ds.size} values of d",
            "progression",
        )
    d = int(ds[hits[0]])
    logger.debug(f"Progression found: d={d}, l={l}, m={m}, level={good.scale}")
    return ProgressionWitness(j=good.scale, d=d, l=l, multiplier=m)
