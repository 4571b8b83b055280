"""
Set specs: build finite-window sets from short command-line strings.

    mod:q,a          {t : t = a mod q}
    file:<path>      newline-separated integers ('#' starts a comment)
    expr:<formula>   boolean formula over atoms

Formula grammar:

    formula := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "~" unary | "(" formula ")" | atom
    atom    := all | square | nonsquare | odd | even
             | mod(q, a) | range(a, b)

On a dyadic level the predicate is applied to the lowest-terms numerator, so a
residue rule describes the same set of rationals at every level.
"""

import re
from pathlib import Path
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from partreg_core.colouring.rules import reduce_dyadic
from partreg_core.config import EngineConfig
from partreg_core.logging import get_logger
from partreg_core.sumsets.stabilize import (
    CosetReport,
    StabilizationReport,
    stabilize_asymmetric,
    stabilize_dyadic,
    stabilize_symmetric,
)
from partreg_core.sumsets.windowset import WindowSet, difference
from partreg_core.validation import ContractViolation

logger = get_logger(__name__)

Predicate = Callable[[np.ndarray], np.ndarray]

_FORMULA_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<int>-?\d+)|(?P<name>[a-z]+)|(?P<op>[~&|(),])"
)


def _is_square(ts: np.ndarray) -> np.ndarray:
    ts = np.asarray(ts, dtype=np.int64)
    roots = np.floor(np.sqrt(np.maximum(ts, 0).astype(np.float64))).astype(np.int64)
    # float sqrt can be off by one for large t
    roots = np.where((roots + 1) * (roots + 1) <= ts, roots + 1, roots)
    roots = np.where(roots * roots > ts, roots - 1, roots)
    return (ts >= 0) & (roots * roots == ts)


class _FormulaParser:
    """Recursive-descent parser producing a vectorized predicate."""

    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, str]] = []
        pos = 0
        while pos < len(text):
            match = _FORMULA_TOKEN.match(text, pos)
            if match is None:
                raise ContractViolation(f"Unexpected {text[pos]!r} at position {pos + 1} in {text!r}")
            if match.lastgroup != "ws":
                self.tokens.append((match.lastgroup or "", match.group()))
            pos = match.end()
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos][1] if self.pos < len(self.tokens) else None

    def take(self, expected: Optional[str] = None) -> Tuple[str, str]:
        if self.pos >= len(self.tokens):
            raise ContractViolation(f"Formula {self.text!r} ends early")
        kind, text = self.tokens[self.pos]
        if expected is not None and text != expected:
            raise ContractViolation(f"Expected {expected!r} but found {text!r} in {self.text!r}")
        self.pos += 1
        return kind, text

    def integer(self) -> int:
        kind, text = self.take()
        if kind != "int":
            raise ContractViolation(f"Expected an integer but found {text!r} in {self.text!r}")
        return int(text)

    def parse(self) -> Predicate:
        predicate = self.formula()
        if self.pos != len(self.tokens):
            raise ContractViolation(f"Unexpected {self.peek()!r} in {self.text!r}")
        return predicate

    def formula(self) -> Predicate:
        parts = [self.conj()]
        while self.peek() == "|":
            self.take("|")
            parts.append(self.conj())
        if len(parts) == 1:
            return parts[0]
        return lambda ts: np.logical_or.reduce([p(ts) for p in parts])

    def conj(self) -> Predicate:
        parts = [self.unary()]
        while self.peek() == "&":
            self.take("&")
            parts.append(self.unary())
        if len(parts) == 1:
            return parts[0]
        return lambda ts: np.logical_and.reduce([p(ts) for p in parts])

    def unary(self) -> Predicate:
        if self.peek() == "~":
            self.take("~")
            inner = self.unary()
            return lambda ts: ~inner(ts)
        if self.peek() == "(":
            self.take("(")
            inner = self.formula()
            self.take(")")
            return inner
        return self.atom()

    def atom(self) -> Predicate:
        kind, name = self.take()
        if kind != "name":
            raise ContractViolation(f"Expected an atom but found {name!r} in {self.text!r}")
        if name == "all":
            return lambda ts: np.ones(np.shape(ts), dtype=bool)
        if name == "square":
            return _is_square
        if name == "nonsquare":
            return lambda ts: ~_is_square(ts)
        if name == "odd":
            return lambda ts: np.mod(ts, 2) == 1
        if name == "even":
            return lambda ts: np.mod(ts, 2) == 0
        if name in ("mod", "range"):
            self.take("(")
            first = self.integer()
            self.take(",")
            second = self.integer()
            self.take(")")
            if name == "mod":
                if first < 1:
                    raise ContractViolation(f"Modulus must be >= 1 in {self.text!r}")
                return lambda ts: np.mod(ts, first) == second % first
            return lambda ts: (ts >= first) & (ts <= second)
        raise ContractViolation(f"Unknown atom {name!r} in {self.text!r}")


def parse_formula(text: str) -> Predicate:
    """Compile an expr: formula into a vectorized predicate on numerators."""
    return _FormulaParser(text.strip().lower()).parse()


def _file_predicate(path: str) -> Predicate:
    members = []
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            members.append(int(text))
        except ValueError:
            raise ContractViolation(f"{path}:{line_no}: not an integer: {text!r}")
    table = np.unique(np.asarray(members, dtype=np.int64))
    logger.debug(f"Loaded {table.size} members from {path}")
    return lambda ts: np.isin(ts, table)


def set_predicate(spec: str) -> Predicate:
    """
    Compile a set spec into a vectorized predicate on integers.

    Raises:
        ContractViolation: On an unknown or malformed spec
    """
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "mod":
        try:
            q_text, a_text = rest.split(",")
            q, a = int(q_text), int(a_text)
        except ValueError:
            raise ContractViolation(f"Residue spec must look like mod:q,a, got {spec!r}")
        if q < 1:
            raise ContractViolation(f"Modulus must be >= 1, got {q}")
        return lambda ts: np.mod(ts, q) == a % q
    if kind == "file":
        return _file_predicate(rest)
    if kind == "expr":
        return parse_formula(rest)
    raise ContractViolation(f"Unknown set spec {spec!r}")


def parse_set(spec: str, lo: int, hi: int, scale: int = 0) -> WindowSet:
    """Finite set of numerators in [lo, hi] at a level, from a set spec."""
    predicate = set_predicate(spec)
    if scale == 0:
        return WindowSet.from_predicate(predicate, lo, hi)
    return WindowSet.from_predicate(lambda ts: predicate(reduce_dyadic(ts, scale)[0]), lo, hi, scale)


def parse_set_levels(spec: str, window: int, levels: int) -> List[WindowSet]:
    """Per-level sets on [1..window] for levels 0..levels-1."""
    if levels < 1:
        raise ContractViolation(f"Need at least one level, got {levels}")
    predicate = set_predicate(spec)
    return [
        WindowSet.from_predicate(lambda ts, j=j: predicate(reduce_dyadic(ts, j)[0]), 1, window, j)
        for j in range(levels)
    ]


STABILIZE_MODES = ("difference", "symmetric", "asymmetric", "dyadic")


def stabilize_spec(
    spec: str,
    window: int,
    mode: str = "difference",
    levels: int = 1,
    k: Optional[int] = None,
    config: Optional[EngineConfig] = None,
) -> Union[StabilizationReport, CosetReport]:
    """
    Build a set from a spec and run the requested stabilization on it.

    Modes:
        difference   A on [1..window]; stabilize A - A
        symmetric    S on [-window..window] as given (must be symmetric and hold 0)
        asymmetric   A on [1..window]; cosets of A - kA
        dyadic       A_j on [1..window] at levels 0..levels-1

    Raises:
        ContractViolation: On an unknown mode or a set the mode cannot take
        Inconclusive: If the window is too small for the run
    """
    config = config or EngineConfig()
    if mode == "difference":
        a = parse_set(spec, 1, window)
        return stabilize_symmetric(difference(a, a, config.max_window_bits), config)
    if mode == "symmetric":
        return stabilize_symmetric(parse_set(spec, -window, window), config)
    if mode == "asymmetric":
        _, report = stabilize_asymmetric(parse_set(spec, 1, window), k=k, config=config)
        return report
    if mode == "dyadic":
        return stabilize_dyadic(parse_set_levels(spec, window, levels), config)
    raise ContractViolation(f"Unknown stabilization mode {mode!r}; expected one of {STABILIZE_MODES}")
