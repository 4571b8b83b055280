"""
Colourings of integer and dyadic windows.

A Domain is the union over levels j = 0..max_level of 2^-j * [lo..hi]; with
max_level = 0 it is the integer window [lo..hi]. A colouring assigns colours
1..r through a rule evaluated on numerators; colour 0 marks an uncoloured point
(which makes the colouring fail the partition check).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from partreg_core.logging import get_logger
from partreg_core.sumsets.windowset import WindowSet
from partreg_core.validation import ContractViolation

logger = get_logger(__name__)


def two_adic_valuation(ts: np.ndarray) -> np.ndarray:
    """v2(t) for non-zero t (0 maps to 63)."""
    ts = np.asarray(ts, dtype=np.int64)
    lowbit = ts & -ts
    lowbit = np.where(lowbit == 0, np.int64(1) << 62, lowbit)
    _, exponent = np.frexp(lowbit.astype(np.float64))
    return np.where(ts == 0, 63, exponent - 1).astype(np.int64)


def reduce_dyadic(ts: np.ndarray, level: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Lowest-terms form of t / 2^level.

    Returns:
        (numerators, minimal levels)
    """
    ts = np.asarray(ts, dtype=np.int64)
    shift = np.minimum(two_adic_valuation(ts), level)
    return ts >> shift, level - shift


@dataclass(frozen=True)
class Domain:
    """
    Window descriptor: numerators lo..hi at every level 0..max_level.

    Attributes:
        lo: Lowest numerator
        hi: Highest numerator
        max_level: Deepest dyadic level (0 for an integer window)
    """

    lo: int
    hi: int
    max_level: int = 0

    def __post_init__(self):
        if self.hi < self.lo:
            raise ContractViolation(f"Empty domain [{self.lo}, {self.hi}]")
        if self.max_level < 0:
            raise ContractViolation("max_level must be >= 0")

    @property
    def levels(self) -> range:
        return range(self.max_level + 1)

    def numerators(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1, dtype=np.int64)

    def contains(self, x: Fraction) -> bool:
        den = x.denominator
        e = den.bit_length() - 1
        if den != 1 << e or e > self.max_level:
            return False
        return any(self.lo <= x * (1 << j) <= self.hi for j in range(e, self.max_level + 1))

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "max_level": self.max_level}


class ColouringRule:
    """Base class: colours of numerators t at a level (0 = uncoloured)."""

    name = "rule"

    def colours(self, ts: np.ndarray, level: int) -> np.ndarray:
        raise NotImplementedError

    def num_colours(self) -> int:
        raise NotImplementedError

    def spec(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ExplicitArray(ColouringRule):
    """
    Colour list for integers start, start+1, ...

    Attributes:
        values: Colour of each integer in order
        start: Integer coloured by values[0]
    """

    values: Tuple[int, ...]
    start: int = 1
    name = "explicit"

    def colours(self, ts: np.ndarray, level: int) -> np.ndarray:
        if level != 0:
            raise ContractViolation("Explicit colourings are defined on integers only")
        table = np.asarray(self.values, dtype=np.int64)
        idx = np.asarray(ts, dtype=np.int64) - self.start
        inside = (idx >= 0) & (idx < table.size)
        out = np.zeros(idx.shape, dtype=np.int64)
        out[inside] = table[idx[inside]]
        return out

    def num_colours(self) -> int:
        return max(self.values) if self.values else 0

    def spec(self) -> str:
        return f"explicit:{self.start}:{','.join(str(v) for v in self.values)}"


@dataclass(frozen=True)
class ResidueMod(ColouringRule):
    """
    Colour by the residue of the lowest-terms numerator modulo q.

    Attributes:
        q: Modulus
        mapping: residue -> colour; residues left out are uncoloured
    """

    q: int
    mapping: Tuple[Tuple[int, int], ...] = ()
    name = "mod"

    def __post_init__(self):
        if self.q < 1:
            raise ContractViolation(f"Modulus must be >= 1, got {self.q}")
        if not self.mapping:
            object.__setattr__(self, "mapping", tuple((a, a + 1) for a in range(self.q)))

    @classmethod
    def with_map(cls, q: int, mapping: Mapping[int, int]) -> "ResidueMod":
        return cls(q, tuple(sorted((int(a) % q, int(c)) for a, c in mapping.items())))

    def table(self) -> np.ndarray:
        table = np.zeros(self.q, dtype=np.int64)
        for residue, colour in self.mapping:
            table[residue % self.q] = colour
        return table

    def colours(self, ts: np.ndarray, level: int) -> np.ndarray:
        numerators, _ = reduce_dyadic(ts, level)
        return self.table()[np.mod(numerators, self.q)]

    def num_colours(self) -> int:
        return max(c for _, c in self.mapping)

    def spec(self) -> str:
        default = tuple((a, a + 1) for a in range(self.q))
        if self.mapping == default:
            return f"mod:{self.q}"
        return f"mod:{self.q}:" + ",".join(f"{a}={c}" for a, c in self.mapping)


@dataclass(frozen=True)
class Sign(ColouringRule):
    """Colour 1 for positive, 2 for negative; 0 stays uncoloured."""

    name = "sign"

    def colours(self, ts: np.ndarray, level: int) -> np.ndarray:
        ts = np.asarray(ts, dtype=np.int64)
        return np.where(ts > 0, 1, np.where(ts < 0, 2, 0)).astype(np.int64)

    def num_colours(self) -> int:
        return 2

    def spec(self) -> str:
        return "sign"


@dataclass(frozen=True)
class LevelRule(ColouringRule):
    """
    Colour by the minimal dyadic level of the element: (level mod period) + 1.

    With period 2 this is the level-parity colouring.
    """

    period: int = 2
    name = "level"

    def __post_init__(self):
        if self.period < 1:
            raise ContractViolation(f"Period must be >= 1, got {self.period}")

    def colours(self, ts: np.ndarray, level: int) -> np.ndarray:
        _, minimal = reduce_dyadic(ts, level)
        return np.mod(minimal, self.period) + 1

    def num_colours(self) -> int:
        return self.period

    def spec(self) -> str:
        return f"level:{self.period}"


@dataclass(frozen=True)
class Colouring:
    """
    A finite colouring of a Domain.

    Attributes:
        domain: The coloured window
        rule: How colours are assigned
        r: Number of colours (defaults to the rule's maximum colour)
    """

    domain: Domain
    rule: ColouringRule
    r: int = 0

    def __post_init__(self):
        if self.r == 0:
            object.__setattr__(self, "r", self.rule.num_colours())
        if self.r < 1:
            raise ContractViolation("A colouring needs at least one colour")
        if isinstance(self.rule, ExplicitArray) and self.domain.max_level != 0:
            raise ContractViolation("Explicit colourings need an integer domain")

    @property
    def spec(self) -> str:
        return self.rule.spec()

    def level_colours(self, level: int = 0) -> np.ndarray:
        """Colours of numerators lo..hi at the given level."""
        if level not in self.domain.levels:
            raise ContractViolation(f"Level {level} is outside 0..{self.domain.max_level}")
        return self.rule.colours(self.domain.numerators(), level)

    def colour_of(self, x: Fraction) -> int:
        """
        Colour of a domain element.

        Raises:
            ContractViolation: If x is outside the domain
        """
        x = Fraction(x)
        if not self.domain.contains(x):
            raise ContractViolation(f"{x} is outside the colouring's domain")
        level = x.denominator.bit_length() - 1
        return int(self.rule.colours(np.array([x.numerator], dtype=np.int64), level)[0])

    def colours_of(self, numerators: Sequence[int], level: int) -> np.ndarray:
        """Colours of 2^-level * t for arbitrary numerators t (no domain check)."""
        return self.rule.colours(np.asarray(numerators, dtype=np.int64), level)

    def class_set(self, colour: int, level: int = 0) -> WindowSet:
        """Members of a colour class at one level as a finite WindowSet."""
        bits = self.level_colours(level) == colour
        return WindowSet.finite(bits, self.domain.lo, level)

    def class_levels(self, colour: int) -> List[WindowSet]:
        return [self.class_set(colour, j) for j in self.domain.levels]

    def present_colours(self) -> List[int]:
        """Colours with at least one member at some level."""
        seen = set()
        for j in self.domain.levels:
            seen.update(int(c) for c in np.unique(self.level_colours(j)))
        return sorted(c for c in seen if c > 0)

    def induced(self, step: int, length: int, level: int = 0) -> "Colouring":
        """
        Colouring of [1..length] given by u -> colour(2^-level * step * u), keeping labels.
        """
        us = np.arange(1, length + 1, dtype=np.int64)
        values = self.colours_of(step * us, level)
        return Colouring(Domain(1, length), ExplicitArray(tuple(int(v) for v in values), 1), self.r)

    def to_dict(self) -> dict:
        return {"spec": self.spec, "r": self.r, "domain": self.domain.to_dict()}


def verify_colouring_partition(col: Colouring) -> bool:
    """True iff every domain element receives exactly one colour in 1..r."""
    for j in col.domain.levels:
        try:
            colours = col.level_colours(j)
        except ContractViolation:
            return False
        if colours.size == 0 or colours.min() < 1 or colours.max() > col.r:
            return False
    return True


def explicit_colouring(values: Sequence[int], start: int = 1, r: int = 0) -> Colouring:
    """Colouring of [start..start+len-1] from an explicit colour list."""
    if not values:
        raise ContractViolation("Explicit colouring needs at least one value")
    return Colouring(Domain(start, start + len(values) - 1), ExplicitArray(tuple(int(v) for v in values), start), r)


def parse_colouring(
    spec: str, window: int, max_level: int = 0, lo: Optional[int] = None
) -> Colouring:
    """
    Build a colouring from a spec string.

    Specs:
        mod:q                residue a gets colour a+1
        mod:q:a1=c1,a2=c2    explicit residue map (missing residues stay uncoloured)
        sign                 positive / negative on [-window..window]
        level:p              minimal dyadic level modulo p
        file:<path>          one colour per line for 1, 2, ...

    Args:
        spec: Colouring spec
        window: Numerator window size (the domain is [1..window] unless noted)
        max_level: Deepest dyadic level
        lo: Override for the lowest numerator

    Raises:
        ContractViolation: On an unknown or malformed spec
    """
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "mod":
        q_text, _, map_text = rest.partition(":")
        try:
            q = int(q_text)
            if map_text:
                pairs = (item.split("=") for item in map_text.split(",") if item.strip())
                rule: ColouringRule = ResidueMod.with_map(q, {int(a): int(c) for a, c in pairs})
            else:
                rule = ResidueMod(q)
        except ValueError:
            raise ContractViolation(f"Malformed residue colouring {spec!r}")
        return Colouring(Domain(1 if lo is None else lo, window, max_level), rule)
    if kind == "sign":
        return Colouring(Domain(-window if lo is None else lo, window, max_level), Sign())
    if kind == "level":
        try:
            period = int(rest) if rest else 2
        except ValueError:
            raise ContractViolation(f"Malformed level colouring {spec!r}")
        return Colouring(Domain(1 if lo is None else lo, window, max_level), LevelRule(period))
    if kind == "file":
        return load_colouring_file(rest)
    if kind == "explicit":
        start_text, _, values_text = rest.partition(":")
        values = [int(v) for v in values_text.split(",") if v.strip()]
        return explicit_colouring(values, int(start_text))
    raise ContractViolation(f"Unknown colouring spec {spec!r}")


def load_colouring_file(path: Union[str, Path]) -> Colouring:
    """Read one colour index per line; line i colours the integer i."""
    values: List[int] = []
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            values.append(int(text))
        except ValueError:
            raise ContractViolation(f"{path}:{line_no}: not a colour index: {text!r}")
    logger.debug(f"Loaded explicit colouring of [1..{len(values)}] from {path}")
    return explicit_colouring(values)
