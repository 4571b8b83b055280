"""
Extension witnesses: k elements of a colour class whose sums differ by a target.

For Systems A and B equation k asks for x's and z's in the class with
sum(z) - sum(x) = c(k) * y, i.e. a v in kA with v + c(k) * y in kA. System C
asks for a single z in A with z - c(k) * y in kA. Both searches scan the k-fold
sumset for the least admissible value and then peel it back into k members.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from partreg_core.logging import get_logger
from partreg_core.model.ratlin import format_rational
from partreg_core.sumsets.windowset import WindowSet, sumset_layers
from partreg_core.validation import ContractViolation, InternalError

logger = get_logger(__name__)


@dataclass
class ExtensionWitness:
    """
    Values for equation k found by the witness search.

    Attributes:
        k: Equation index
        target: c(k) * y
        xs: x_{k,1..k}
        zs: z_{k,1..k} (a single value for System C)
        level: Dyadic level the search ran at
    """

    k: int
    target: Fraction
    xs: Tuple[Fraction, ...]
    zs: Tuple[Fraction, ...]
    level: int = 0

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "target": format_rational(self.target),
            "xs": [format_rational(x) for x in self.xs],
            "zs": [format_rational(z) for z in self.zs],
            "level": self.level,
        }


def _members_mask(layer: WindowSet, ts: np.ndarray) -> np.ndarray:
    """Membership of arbitrary numerators (False outside the stored window)."""
    idx = ts - layer.lo
    inside = (idx >= 0) & (idx < layer.bits.size)
    out = np.zeros(ts.shape, dtype=bool)
    out[inside] = layer.bits[idx[inside]]
    return out


def peel(layers: List[WindowSet], value: int, j: int) -> List[int]:
    """
    Split a member of jA into j members of A.

    Each step takes the least a in A with value - a in (j-1)A.

    Raises:
        InternalError: If value is not in jA
    """
    base = layers[0].members()
    parts: List[int] = []
    while j > 1:
        rest = value - base
        ok = _members_mask(layers[j - 2], rest)
        hits = np.flatnonzero(ok)
        if hits.size == 0:
            raise InternalError(f"{value} is not a sum of {j} class members")
        a = int(base[hits[0]])
        parts.append(a)
        value -= a
        j -= 1
    if not layers[0].contains(value):
        raise InternalError(f"{value} is not a class member")
    parts.append(value)
    return parts


def difference_witness(layers: List[WindowSet], k: int, target: int) -> Optional[Tuple[List[int], List[int]]]:
    """
    Least v in kA with v + target in kA, peeled into (xs, zs).

    Args:
        layers: [A, 2A, ..., at least kA] of a finite class prefix
        k: Number of summands on each side
        target: Numerator of c(k) * y at the layers' scale

    Returns:
        (xs, zs) numerators, or None when the prefix holds no witness
    """
    if k < 1 or k > len(layers):
        raise ContractViolation(f"Need 1 <= k <= {len(layers)}, got {k}")
    layer = layers[k - 1]
    vs = layer.members()
    hits = np.flatnonzero(_members_mask(layer, vs + target))
    if hits.size == 0:
        return None
    v = int(vs[hits[0]])
    return peel(layers, v, k), peel(layers, v + target, k)


def single_witness(layers: List[WindowSet], k: int, target: int) -> Optional[Tuple[List[int], int]]:
    """
    Least z in A with z - target in kA, peeled into (xs, z).

    Returns:
        (xs, z) numerators, or None when the prefix holds no witness
    """
    if k < 1 or k > len(layers):
        raise ContractViolation(f"Need 1 <= k <= {len(layers)}, got {k}")
    zs = layers[0].members()
    hits = np.flatnonzero(_members_mask(layers[k - 1], zs - target))
    if hits.size == 0:
        return None
    z = int(zs[hits[0]])
    return peel(layers, z - target, k), z


def class_layers(a: WindowSet, k: int, max_bits: Optional[int] = None) -> List[WindowSet]:
    """[A, 2A, ..., kA] of a finite class prefix."""
    if not a.is_finite:
        raise ContractViolation("Extension search needs a fully known class prefix")
    layers = sumset_layers(a, k, max_bits)
    logger.debug(f"Built {k} sumset layers up to [{layers[-1].lo}, {layers[-1].hi}]")
    return layers
