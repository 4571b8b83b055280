"""
WindowSet: a subset of 2^-j * Z stored as a boolean array over an integer window.

Besides the stored window [lo, hi] a WindowSet carries two intervals:

- the certified region, where stored membership is exact;
- the support, an interval (either end may be open) containing every member of
  the set the window stands for.

Sets built from a colouring or a generator are finite truncations, so support,
certified region and stored window coincide. Sumsets derive the certified
region of the result from both intervals of their inputs, so a result never
claims membership it could not have computed.
"""

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Tuple

import numpy as np

from partreg_core.logging import get_logger
from partreg_core.validation import ContractViolation, WindowTooSmall

logger = get_logger(__name__)

# Sumsets use an FFT once both operands are longer than this
_DIRECT_CONVOLVE_LIMIT = 2048


@dataclass(frozen=True, eq=False)
class WindowSet:
    """
    Finite-window set of numerators t; members are 2^-scale * t.

    Attributes:
        scale: Level j (0 means the set lives in Z)
        lo: Lowest numerator of the stored window
        bits: Membership of lo, lo+1, ..., hi
        certified_lo: Start of the region where membership is exact
        certified_hi: End of that region
        support_lo: Lower bound on all members (None: unbounded)
        support_hi: Upper bound on all members (None: unbounded)
    """

    scale: int
    lo: int
    bits: np.ndarray
    certified_lo: int
    certified_hi: int
    support_lo: Optional[int] = None
    support_hi: Optional[int] = None

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.ndim != 1 or bits.size == 0:
            raise ContractViolation("WindowSet bits must be a non-empty 1-d array")
        if self.scale < 0:
            raise ContractViolation(f"Scale must be >= 0, got {self.scale}")
        hi = self.lo + bits.size - 1
        if not (self.lo <= self.certified_lo <= self.certified_hi <= hi):
            raise ContractViolation(
                f"Certified region [{self.certified_lo}, {self.certified_hi}] "
                f"must lie inside the window [{self.lo}, {hi}]"
            )
        if self.support_lo is not None and self.support_lo > self.lo:
            bits = bits.copy()
            bits[: min(self.support_lo - self.lo, bits.size)] = False
        if self.support_hi is not None and self.support_hi < hi:
            bits = bits.copy()
            bits[max(self.support_hi - self.lo + 1, 0):] = False
        bits = bits.copy() if bits is self.bits else bits
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    # Construction

    @classmethod
    def finite(cls, bits: np.ndarray, lo: int, scale: int = 0) -> "WindowSet":
        """A fully known finite set: support = certified region = window."""
        bits = np.asarray(bits, dtype=bool)
        hi = lo + bits.size - 1
        return cls(scale, lo, bits, lo, hi, lo, hi)

    @classmethod
    def from_members(cls, members: Iterable[int], lo: int, hi: int, scale: int = 0) -> "WindowSet":
        """Finite set of the given numerators on the window [lo, hi]."""
        if hi < lo:
            raise ContractViolation(f"Empty window [{lo}, {hi}]")
        bits = np.zeros(hi - lo + 1, dtype=bool)
        for t in members:
            if not lo <= t <= hi:
                raise ContractViolation(f"Member {t} lies outside the window [{lo}, {hi}]")
            bits[t - lo] = True
        return cls.finite(bits, lo, scale)

    @classmethod
    def from_predicate(
        cls, predicate: Callable[[np.ndarray], np.ndarray], lo: int, hi: int, scale: int = 0
    ) -> "WindowSet":
        """Finite set {t in [lo, hi] : predicate(t)} with a vectorized predicate."""
        if hi < lo:
            raise ContractViolation(f"Empty window [{lo}, {hi}]")
        ts = np.arange(lo, hi + 1, dtype=np.int64)
        return cls.finite(np.asarray(predicate(ts), dtype=bool), lo, scale)

    @classmethod
    def residue_class(cls, modulus: int, residue: int, lo: int, hi: int, scale: int = 0) -> "WindowSet":
        """{t in [lo, hi] : t = residue mod modulus}."""
        if modulus < 1:
            raise ContractViolation(f"Modulus must be >= 1, got {modulus}")
        return cls.from_predicate(lambda t: np.mod(t, modulus) == residue % modulus, lo, hi, scale)

    # Views

    @property
    def hi(self) -> int:
        return self.lo + self.bits.size - 1

    @property
    def is_finite(self) -> bool:
        return (
            self.support_lo is not None
            and self.support_hi is not None
            and self.certified_lo <= self.support_lo
            and self.support_hi <= self.certified_hi
        )

    def contains(self, t: int) -> bool:
        """Stored membership of numerator t (False outside the window)."""
        if t < self.lo or t > self.hi:
            return False
        return bool(self.bits[t - self.lo])

    def members(self, lo: Optional[int] = None, hi: Optional[int] = None) -> np.ndarray:
        """Sorted numerators stored in [lo, hi] (defaults to the whole window)."""
        lo = self.lo if lo is None else max(lo, self.lo)
        hi = self.hi if hi is None else min(hi, self.hi)
        if hi < lo:
            return np.zeros(0, dtype=np.int64)
        return np.flatnonzero(self.bits[lo - self.lo : hi - self.lo + 1]).astype(np.int64) + lo

    def certified_members(self) -> np.ndarray:
        return self.members(self.certified_lo, self.certified_hi)

    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def slice_bits(self, lo: int, hi: int) -> np.ndarray:
        """
        Membership of lo..hi, which must lie inside the certified region.

        Raises:
            WindowTooSmall: If [lo, hi] leaves the certified region
        """
        if lo < self.certified_lo or hi > self.certified_hi:
            raise WindowTooSmall(
                f"Region [{lo}, {hi}] is not inside the certified region "
                f"[{self.certified_lo}, {self.certified_hi}]",
                stage="slice",
            )
        return self.bits[lo - self.lo : hi - self.lo + 1]

    def element_gcd(self) -> int:
        """gcd of all stored members (0 for the empty set or {0})."""
        members = self.members()
        if members.size == 0:
            return 0
        return int(np.gcd.reduce(np.abs(members)))

    # Transformations

    def restrict(self, lo: int, hi: int) -> "WindowSet":
        """Sub-window [lo, hi]; the certified region shrinks accordingly."""
        lo, hi = max(lo, self.lo), min(hi, self.hi)
        clo, chi = max(lo, self.certified_lo), min(hi, self.certified_hi)
        if hi < lo or chi < clo:
            raise WindowTooSmall(f"Restriction to [{lo}, {hi}] leaves no certified region", "restrict")
        return WindowSet(
            self.scale,
            lo,
            self.bits[lo - self.lo : hi - self.lo + 1],
            clo,
            chi,
            self.support_lo,
            self.support_hi,
        )

    def truncate(self, lo: int, hi: int) -> "WindowSet":
        """The finite set S intersected with [lo, hi], fully known."""
        restricted = self.restrict(lo, hi)
        if restricted.certified_lo != restricted.lo or restricted.certified_hi != restricted.hi:
            raise WindowTooSmall(f"[{lo}, {hi}] is not fully certified", "truncate")
        return WindowSet.finite(restricted.bits, restricted.lo, self.scale)

    def negate(self) -> "WindowSet":
        return WindowSet(
            self.scale,
            -self.hi,
            self.bits[::-1],
            -self.certified_hi,
            -self.certified_lo,
            None if self.support_hi is None else -self.support_hi,
            None if self.support_lo is None else -self.support_lo,
        )

    def translate(self, shift: int) -> "WindowSet":
        return WindowSet(
            self.scale,
            self.lo + shift,
            self.bits,
            self.certified_lo + shift,
            self.certified_hi + shift,
            None if self.support_lo is None else self.support_lo + shift,
            None if self.support_hi is None else self.support_hi + shift,
        )

    def with_member(self, t: int) -> "WindowSet":
        """Adjoin a numerator inside the certified region."""
        if not self.certified_lo <= t <= self.certified_hi:
            raise ContractViolation(f"Cannot adjoin {t} outside the certified region")
        bits = self.bits.copy()
        bits[t - self.lo] = True
        support_lo = None if self.support_lo is None else min(self.support_lo, t)
        support_hi = None if self.support_hi is None else max(self.support_hi, t)
        return WindowSet(self.scale, self.lo, bits, self.certified_lo, self.certified_hi, support_lo, support_hi)

    def embed(self, levels: int = 1) -> "WindowSet":
        """The same set of rationals written at scale + levels (t -> t * 2^levels)."""
        factor = 1 << levels
        size = (self.bits.size - 1) * factor + 1
        bits = np.zeros(size, dtype=bool)
        bits[::factor] = self.bits
        return WindowSet(
            self.scale + levels,
            self.lo * factor,
            bits,
            self.certified_lo * factor,
            self.certified_hi * factor,
            None if self.support_lo is None else self.support_lo * factor,
            None if self.support_hi is None else self.support_hi * factor,
        )

    def describe(self) -> dict:
        """Summary without the bitset (for logs and reports)."""
        return {
            "scale": self.scale,
            "window": [self.lo, self.hi],
            "certified": [self.certified_lo, self.certified_hi],
            "support": [self.support_lo, self.support_hi],
            "members": self.count(),
        }


def _check_scale(a: WindowSet, b: WindowSet) -> None:
    if a.scale != b.scale:
        raise ContractViolation(f"Scale mismatch: {a.scale} vs {b.scale}")


def _add_open(a: Optional[int], b: Optional[int]) -> Optional[int]:
    return None if a is None or b is None else a + b


def _certified_sum_region(a: WindowSet, b: WindowSet) -> Tuple[Optional[int], Optional[int]]:
    """
    Region of sums s whose every representation a' + b' (a', b' in the supports)
    has both summands inside the inputs' certified regions.

    Returns (lower, upper); None means unbounded on that side, and
    (lower > upper) signals an empty region.
    """
    lower: Optional[int] = None
    upper: Optional[int] = None
    empty = (1, 0)

    def raise_lower(bound: Optional[int]) -> bool:
        nonlocal lower
        if bound is None:
            return False
        lower = bound if lower is None else max(lower, bound)
        return True

    def cut_upper(bound: Optional[int]) -> bool:
        nonlocal upper
        if bound is None:
            return False
        upper = bound if upper is None else min(upper, bound)
        return True

    for x, y in ((a, b), (b, a)):
        # every x-summand >= x.certified_lo
        if x.support_lo is None or x.support_lo < x.certified_lo:
            if not raise_lower(_add_open(x.certified_lo, y.support_hi)):
                return empty
        # every x-summand <= x.certified_hi
        if x.support_hi is None or x.support_hi > x.certified_hi:
            if not cut_upper(_add_open(x.certified_hi, y.support_lo)):
                return empty
    return lower, upper


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Boolean sumset kernel: (a * b)[s] > 0 with exact small cases and FFT otherwise."""
    if min(a.size, b.size) <= _DIRECT_CONVOLVE_LIMIT:
        counts = np.convolve(a.astype(np.int64), b.astype(np.int64))
        return counts > 0
    n = a.size + b.size - 1
    fa = np.fft.rfft(a.astype(np.float64), n)
    fb = np.fft.rfft(b.astype(np.float64), n)
    counts = np.fft.irfft(fa * fb, n)
    return counts > 0.5


def sumset(a: WindowSet, b: WindowSet, max_bits: Optional[int] = None) -> WindowSet:
    """
    A + B on the natural window [a.lo + b.lo, a.hi + b.hi].

    The result is exact on its certified region: every element there has all its
    representations' summands inside the inputs' certified regions. For finite
    inputs this is [a.certified_lo + b.certified_lo, a.certified_hi + b.certified_hi].

    Args:
        a: First summand
        b: Second summand (same scale)
        max_bits: Optional clip of the stored window, centred on the certified region

    Returns:
        The sumset

    Raises:
        ContractViolation: On a scale mismatch
        WindowTooSmall: If the certified region is empty
    """
    _check_scale(a, b)
    lo = a.lo + b.lo
    hi = a.hi + b.hi
    region_lo, region_hi = _certified_sum_region(a, b)
    clo = lo if region_lo is None else max(lo, region_lo)
    chi = hi if region_hi is None else min(hi, region_hi)

    bits = _convolve(a.bits, b.bits)

    if max_bits is not None and bits.size > max_bits:
        centre = (clo + chi) // 2 if clo <= chi else (lo + hi) // 2
        new_lo = max(lo, centre - max_bits // 2)
        new_hi = min(hi, new_lo + max_bits - 1)
        bits = bits[new_lo - lo : new_hi - lo + 1]
        lo, hi = new_lo, new_hi
        clo, chi = max(clo, lo), min(chi, hi)

    if chi < clo:
        raise WindowTooSmall("Sumset has an empty certified region")

    return WindowSet(
        a.scale,
        lo,
        bits,
        clo,
        chi,
        _add_open(a.support_lo, b.support_lo),
        _add_open(a.support_hi, b.support_hi),
    )


def difference(a: WindowSet, b: WindowSet, max_bits: Optional[int] = None) -> WindowSet:
    """A - B, computed as A + (-B)."""
    return sumset(a, b.negate(), max_bits)


def iterate_sumset(s: WindowSet, k: int, max_bits: Optional[int] = None) -> WindowSet:
    """
    kS = S + ... + S (k times) by repeated doubling.

    Raises:
        ContractViolation: If k < 1
        WindowTooSmall: If a certified region becomes empty
    """
    if k < 1:
        raise ContractViolation(f"k must be >= 1, got {k}")
    result: Optional[WindowSet] = None
    power = s
    remaining = k
    while remaining:
        if remaining & 1:
            result = power if result is None else sumset(result, power, max_bits)
        remaining >>= 1
        if remaining:
            power = sumset(power, power, max_bits)
    assert result is not None
    logger.debug(f"Computed {k}-fold sumset on window [{result.lo}, {result.hi}]")
    return result


def sumset_layers(s: WindowSet, k: int, max_bits: Optional[int] = None) -> list:
    """[S, 2S, ..., kS] built by successive addition."""
    if k < 1:
        raise ContractViolation(f"k must be >= 1, got {k}")
    layers = [s]
    for _ in range(k - 1):
        layers.append(sumset(layers[-1], s, max_bits))
    return layers
