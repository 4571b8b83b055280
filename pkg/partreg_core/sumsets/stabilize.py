"""
Stabilization detection for iterated sumsets.

- stabilize_symmetric: for symmetric S containing 0 the chain S ⊆ 2S ⊆ 3S ⊆ ...
  settles on m*Z; find where.
- stabilize_asymmetric: A - kA settles into a union of cosets of m*Z.
- stabilize_dyadic: per-level symmetric stabilization on dyadic levels, with the
  modulus taken as the one occurring most often among the provided levels.

All comparisons happen on a probe region [-P, P] well inside the certified
region, with P = floor(probe_fraction * certified half-width).
"""

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from partreg_core.config import EngineConfig
from partreg_core.logging import get_logger
from partreg_core.model.ratlin import format_rational
from partreg_core.sumsets.density import dyadic_dstar, window_density
from partreg_core.sumsets.windowset import WindowSet, difference, sumset
from partreg_core.validation import ContractViolation, Inconclusive

logger = get_logger(__name__)


@dataclass
class StabilizationReport:
    """
    Outcome of a symmetric (or per-level dyadic) stabilization run.

    Attributes:
        m: Detected subgroup modulus
        K: Smallest k at which kS = (k+1)S = m*Z was observed on the probe
        bound_k: The bound ceil(2/d) (ceil(4/d*) for dyadic runs)
        certified: True when gcd(S) = m and the equality persisted for the
            configured number of further k, checked bit-for-bit on the probe
        density: Window density d (d* for dyadic runs)
        probe_lo: Start of the probe region
        probe_hi: End of the probe region
        scale: Level of the set
        stable_set: KS restricted to the probe region
        gcd_all: gcd of all stored members of S
    """

    m: int
    K: int
    bound_k: int
    certified: bool
    density: Fraction
    probe_lo: int
    probe_hi: int
    scale: int = 0
    stable_set: Optional[WindowSet] = None
    gcd_all: int = 0
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "K": self.K,
            "bound_k": self.bound_k,
            "certified": self.certified,
            "density": format_rational(self.density),
            "probe": [self.probe_lo, self.probe_hi],
            "scale": self.scale,
            "gcd_all": self.gcd_all,
            "notes": list(self.notes),
        }


@dataclass
class CosetReport:
    """
    Coset structure of A - kA modulo m on the probe region.

    Attributes:
        m: Modulus (from symmetric stabilization of (A - A) with 0 adjoined)
        residues: Residues r with (r + m*Z) meeting the set on the probe region
        contains_zero_coset: Whether 0 is among the residues
        k: The k for which A - kA was examined
        K: Index from which S - kS was observed stable (S = A - anchor)
        anchor: The element a0 of A used to translate A onto a set containing 0
        coset_closed: Whether X + m*Z = X held on the probe region
        certified: Stability persisted, the modulus is certified and X is coset-closed
    """

    m: int
    residues: List[int]
    contains_zero_coset: bool
    k: int
    K: int
    anchor: int
    coset_closed: bool
    certified: bool
    probe_lo: int
    probe_hi: int
    symmetric: Optional[StabilizationReport] = None

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "residues": list(self.residues),
            "contains_zero_coset": self.contains_zero_coset,
            "k": self.k,
            "K": self.K,
            "anchor": self.anchor,
            "coset_closed": self.coset_closed,
            "certified": self.certified,
            "probe": [self.probe_lo, self.probe_hi],
            "symmetric": self.symmetric.to_dict() if self.symmetric else None,
        }


@dataclass
class LevelStabilization:
    """Symmetric stabilization of A_j - A_j at one dyadic level."""

    level: int
    density: Fraction
    report: StabilizationReport

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "density": format_rational(self.density),
            "m": self.report.m,
            "K": self.report.K,
            "certified": self.report.certified,
        }


@dataclass
class DyadicStabilizationReport(StabilizationReport):
    """
    StabilizationReport for a family of dyadic levels.

    Attributes:
        per_level: Stabilization of every qualifying level
        qualifying_levels: Levels with d_j > d*/2
        frequency: How many qualifying levels produced the chosen m
    """

    per_level: List[LevelStabilization] = field(default_factory=list)
    qualifying_levels: List[int] = field(default_factory=list)
    frequency: int = 0

    def to_dict(self) -> dict:
        data = super().to_dict()
        data.update(
            {
                "per_level": [entry.to_dict() for entry in self.per_level],
                "qualifying_levels": list(self.qualifying_levels),
                "frequency": self.frequency,
                "stand_in": "most frequent modulus among provided levels",
            }
        )
        return data


def _probe_radius(s: WindowSet, config: EngineConfig) -> int:
    half_width = min(-s.certified_lo, s.certified_hi)
    if half_width < 0:
        raise ContractViolation(
            f"Certified region [{s.certified_lo}, {s.certified_hi}] does not contain 0"
        )
    return int(config.probe_fraction * half_width)


def _is_lattice(bits: np.ndarray, lo: int, m: int) -> bool:
    """Whether bits over lo..lo+len-1 equal m*Z exactly."""
    if m == 0:
        return False
    ts = np.arange(lo, lo + bits.size, dtype=np.int64)
    return bool(np.array_equal(bits, np.mod(ts, m) == 0))


def _bits_gcd(bits: np.ndarray, lo: int) -> int:
    members = np.flatnonzero(bits).astype(np.int64) + lo
    if members.size == 0:
        return 0
    return int(np.gcd.reduce(np.abs(members)))


def stabilize_symmetric(
    s: WindowSet, config: Optional[EngineConfig] = None
) -> StabilizationReport:
    """
    Find the least K with (K+1)S = KS = m*Z on the probe region.

    Because 0 is in S the chain kS is increasing, so the first k whose probe
    slice equals both the next one and the lattice of its own gcd is K.

    Args:
        s: Symmetric set (S = -S on the certified region) containing 0
        config: Engine configuration (probe fraction, persistence, k_max)

    Returns:
        StabilizationReport with the stable set KS on the probe

    Raises:
        ContractViolation: If S is not symmetric, misses 0, or has density 0
        Inconclusive: If no stabilization is seen within k_max or the window starves
    """
    config = config or EngineConfig()
    radius = min(-s.certified_lo, s.certified_hi)
    if radius < 0:
        raise ContractViolation("Certified region must contain 0")
    core = s.slice_bits(-radius, radius)
    if not np.array_equal(core, core[::-1]):
        raise ContractViolation("Set is not symmetric on its certified region")
    if not s.contains(0):
        raise ContractViolation("0 is not a member of the set")
    density = window_density(s)
    if density == 0:
        raise ContractViolation("Set has window density 0")

    probe = _probe_radius(s, config)
    if probe < 1:
        raise Inconclusive("Probe region is empty; enlarge the window", "stabilize_symmetric")
    bound_k = ceil(2 / density)
    gcd_all = s.element_gcd()

    current = s
    current_bits = current.slice_bits(-probe, probe)
    found_k: Optional[int] = None
    found_m = 0
    confirmations = 0
    k = 1
    while k <= config.k_max:
        nxt = sumset(current, s, config.max_window_bits)
        try:
            nxt_bits = nxt.slice_bits(-probe, probe)
        except Inconclusive as e:
            raise Inconclusive(f"{e} at k={k + 1}", "stabilize_symmetric")
        m_k = _bits_gcd(current_bits, -probe)
        stable = np.array_equal(current_bits, nxt_bits) and _is_lattice(current_bits, -probe, m_k)
        if stable:
            if found_k is None:
                found_k, found_m = k, m_k
            confirmations += 1
            if confirmations > config.persistence_steps:
                break
        elif found_k is not None:
            logger.debug(f"Stability observed at k={found_k} broke at k={k}")
            found_k, found_m, confirmations = None, 0, 0
        current, current_bits = nxt, nxt_bits
        k += 1

    if found_k is None:
        raise Inconclusive(
            f"No stabilization within k_max={config.k_max} on probe [-{probe}, {probe}]",
            "stabilize_symmetric",
        )

    persisted = confirmations > config.persistence_steps
    certified = persisted and gcd_all == found_m and s.is_finite
    notes = []
    if not persisted:
        notes.append("stability not re-confirmed before k_max")
    if gcd_all != found_m:
        notes.append(f"gcd of the whole set is {gcd_all}, lattice on probe is {found_m}Z")

    stable_set = WindowSet(
        s.scale, -probe, _lattice_bits(-probe, probe, found_m), -probe, probe, None, None
    )
    logger.info(
        f"Symmetric stabilization: m={found_m}, K={found_k}, bound={bound_k}, certified={certified}"
    )
    return StabilizationReport(
        m=found_m,
        K=found_k,
        bound_k=bound_k,
        certified=certified,
        density=density,
        probe_lo=-probe,
        probe_hi=probe,
        scale=s.scale,
        stable_set=stable_set,
        gcd_all=gcd_all,
        notes=notes,
    )


def _lattice_bits(lo: int, hi: int, m: int) -> np.ndarray:
    return np.mod(np.arange(lo, hi + 1, dtype=np.int64), m) == 0


def stabilize_asymmetric(
    a: WindowSet,
    anchor: Optional[int] = None,
    k: Optional[int] = None,
    config: Optional[EngineConfig] = None,
) -> Tuple[WindowSet, CosetReport]:
    """
    Stabilize A - kA and decompose it into cosets of m*Z.

    With an anchor a0 in A, S = A - a0 contains 0 and S - kS increases with k;
    its stable value X' is found on the probe region, and
    A - kA = (S - kS) + (1 - k) * a0.

    Args:
        a: Dense set
        anchor: Element of A used for the translation (defaults to min A)
        k: The k whose A - kA is returned (defaults to the stabilization index)
        config: Engine configuration

    Returns:
        (X, CosetReport) where X is A - kA on the translated probe region

    Raises:
        ContractViolation: If A has density 0 or the anchor is not a member
        Inconclusive: If stabilization is not observed within k_max
    """
    config = config or EngineConfig()
    density = window_density(a)
    if density == 0:
        raise ContractViolation("Set has window density 0")
    members = a.certified_members()
    if members.size == 0:
        raise ContractViolation("Set is empty on its certified region")
    a0 = int(members[0]) if anchor is None else anchor
    if not a.contains(a0):
        raise ContractViolation(f"Anchor {a0} is not a member of the set")

    diff = difference(a, a, config.max_window_bits)
    if diff.certified_lo <= 0 <= diff.certified_hi and not diff.contains(0):
        diff = diff.with_member(0)
    symmetric = stabilize_symmetric(diff, config)
    m = symmetric.m

    s = a.translate(-a0)
    neg_s = s.negate()
    probe: Optional[int] = None
    chain: List[np.ndarray] = []
    k_fold = s
    found_k: Optional[int] = None
    confirmations = 0
    step = 1
    target_k = k
    while step <= config.k_max + 1:
        t_k = sumset(neg_s, k_fold, config.max_window_bits).negate()  # S - kS
        if probe is None:
            probe = _probe_radius(t_k, config)
            if probe < 1:
                raise Inconclusive("Probe region is empty; enlarge the window", "stabilize_asymmetric")
        try:
            chain.append(t_k.slice_bits(-probe, probe))
        except Inconclusive as e:
            raise Inconclusive(f"{e} at k={step}", "stabilize_asymmetric")
        if step >= 2:
            if np.array_equal(chain[-1], chain[-2]):
                if found_k is None:
                    found_k = step - 1
                confirmations += 1
            elif found_k is not None:
                found_k, confirmations = None, 0
        done_stabilizing = found_k is not None and confirmations > config.persistence_steps
        if done_stabilizing and (target_k is None or step >= target_k):
            break
        if step == config.k_max + 1:
            break
        k_fold = sumset(k_fold, s, config.max_window_bits)
        step += 1

    if found_k is None:
        raise Inconclusive(
            f"A - kA did not stabilize within k_max={config.k_max}", "stabilize_asymmetric"
        )
    if target_k is None:
        target_k = found_k
    if target_k > len(chain):
        raise Inconclusive(f"k={target_k} exceeds the computed chain", "stabilize_asymmetric")
    assert probe is not None

    shift = (1 - target_k) * a0
    x_bits = chain[target_k - 1]
    x = WindowSet(a.scale, -probe + shift, x_bits, -probe + shift, probe + shift, None, None)

    xs = x.members()
    residues = sorted({int(r) for r in np.mod(xs, m)}) if m > 0 else []
    coset_closed = m > 0 and (
        x_bits.size <= m or bool(np.array_equal(x_bits[:-m], x_bits[m:]))
    )
    persisted = confirmations > config.persistence_steps
    certified = persisted and symmetric.certified and coset_closed
    logger.info(
        f"Asymmetric stabilization: m={m}, K={found_k}, k={target_k}, residues={residues}"
    )
    report = CosetReport(
        m=m,
        residues=residues,
        contains_zero_coset=0 in residues,
        k=target_k,
        K=found_k,
        anchor=a0,
        coset_closed=coset_closed,
        certified=certified,
        probe_lo=x.lo,
        probe_hi=x.hi,
        symmetric=symmetric,
    )
    return x, report


def stabilize_dyadic(
    levels: Sequence[WindowSet], config: Optional[EngineConfig] = None
) -> DyadicStabilizationReport:
    """
    Per-level stabilization of A_j - A_j and the modulus that occurs most often.

    Levels with d_j > d*/2 qualify; at least config.min_dyadic_levels of them are
    required. m is the most frequent per-level modulus (ties go to the smallest),
    K is the largest observed index among the levels with that modulus and
    bound_k = ceil(4/d*).

    Args:
        levels: Per-level sets for contiguous levels, in order
        config: Engine configuration

    Returns:
        DyadicStabilizationReport

    Raises:
        Inconclusive: If too few levels qualify
    """
    config = config or EngineConfig()
    dstar = dyadic_dstar(levels)
    if dstar == 0:
        raise Inconclusive("d* proxy is 0 on the provided levels", "stabilize_dyadic")
    densities: Dict[int, Fraction] = {level.scale: window_density(level) for level in levels}
    qualifying = [level for level in levels if densities[level.scale] > dstar / 2]
    if len(qualifying) < config.min_dyadic_levels:
        raise Inconclusive(
            f"Only {len(qualifying)} levels have d_j > d*/2; "
            f"at least {config.min_dyadic_levels} are required",
            "stabilize_dyadic",
        )

    per_level: List[LevelStabilization] = []
    for level in qualifying:
        diff = difference(level, level, config.max_window_bits)
        report = stabilize_symmetric(diff, config)
        per_level.append(LevelStabilization(level.scale, densities[level.scale], report))
        logger.debug(f"Level {level.scale}: m_j={report.m}, K_j={report.K}")

    counts = Counter(entry.report.m for entry in per_level)
    m, frequency = max(counts.items(), key=lambda item: (item[1], -item[0]))
    chosen = [entry for entry in per_level if entry.report.m == m]
    K = max(entry.report.K for entry in chosen)
    certified = all(entry.report.certified for entry in chosen)
    bound_k = ceil(4 / dstar)
    logger.info(
        f"Dyadic stabilization: m={m} on {frequency}/{len(per_level)} levels, K={K}, bound={bound_k}"
    )
    top = chosen[-1].report
    return DyadicStabilizationReport(
        m=m,
        K=K,
        bound_k=bound_k,
        certified=certified,
        density=dstar,
        probe_lo=top.probe_lo,
        probe_hi=top.probe_hi,
        scale=chosen[-1].level,
        stable_set=top.stable_set,
        gcd_all=gcd(*(entry.report.gcd_all for entry in chosen)),
        notes=[f"m chosen as the most frequent of {dict(sorted(counts.items()))}"],
        per_level=per_level,
        qualifying_levels=[entry.level for entry in per_level],
        frequency=frequency,
    )
