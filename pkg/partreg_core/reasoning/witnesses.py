"""
Verifiers for the explicit counterexamples around Systems A, C and I.

- The residue class 1 mod 3 has positive density yet holds no solution of any
  equation of System A, so no density version of System A holds.
- Under the sign colouring of (-delta, delta) minus 0, no assignment makes all
  System I expressions monochromatic inside the interval, so System I is not
  image partition regular near zero.
- For any values of y and the x's, the System I expressions form a solution of
  System C.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

from partreg_core.colouring.rules import Colouring, Domain, ResidueMod
from partreg_core.colouring.search import find_mono_solution
from partreg_core.logging import get_logger
from partreg_core.model.ratlin import RationalLike, format_rational, to_rational
from partreg_core.model.systems import (
    Assignment,
    CoefficientSequence,
    SolutionCheck,
    SystemFamily,
    check_solution,
    evaluate_image_rows,
    generate_image_system,
    generate_prefix,
    image_variables,
    x_name,
)
from partreg_core.validation import (
    ContractViolation,
    InvariantViolation,
    SearchLimits,
    check_positive,
)

logger = get_logger(__name__)


@dataclass
class ModularStep:
    """Residue computation for equation n when every value is r mod 3."""

    n: int
    coefficient: int
    residual_mod3: int
    obstructed: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "coefficient": self.coefficient,
            "residual_mod3": self.residual_mod3,
            "obstructed": self.obstructed,
        }


@dataclass
class SearchStep:
    """Exhaustive search outcome for the first n equations."""

    n: int
    found: bool
    solution: Optional[Dict[str, str]] = None
    nodes: int = 0

    def to_dict(self) -> dict:
        return {"n": self.n, "found": self.found, "solution": self.solution, "nodes": self.nodes}


@dataclass
class ObstructionReport:
    """
    Both renderings of the residue obstruction.

    Attributes:
        n_max: Largest equation examined
        window: Search window [1..window]
        residue: The residue class r mod 3 searched
        modular: Per-equation residue computation
        search: Per-prefix exhaustive search
        obstructed: True when both checks rule out every prefix
        agree: True when the two checks agree for every n
    """

    n_max: int
    window: int
    residue: int
    modular: List[ModularStep] = field(default_factory=list)
    search: List[SearchStep] = field(default_factory=list)
    obstructed: bool = False
    agree: bool = False

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "window": self.window,
            "residue": self.residue,
            "modular": [step.to_dict() for step in self.modular],
            "search": [step.to_dict() for step in self.search],
            "obstructed": self.obstructed,
            "agree": self.agree,
        }


def verify_mod3_obstruction(
    n_max: int,
    window: int,
    residue: int = 1,
    seq: Optional[CoefficientSequence] = None,
    limits: Optional[SearchLimits] = None,
) -> ObstructionReport:
    """
    Check that {t = residue mod 3} holds no solution of System A's equations.

    If every value is r mod 3, the x's and z's of equation n cancel modulo 3
    and the residual is r * c(n) mod 3; with c(n) = 2^n and r = 1 it never
    vanishes. The exhaustive search over [1..window] must agree.

    Args:
        n_max: Largest prefix examined (>= 1)
        window: Search window size
        residue: Residue class searched (0 gives the sanity inversion)
        seq: y-coefficients (default powers of two)
        limits: Search caps
    """
    check_positive(n_max, "n_max")
    check_positive(window, "window")
    seq = seq or CoefficientSequence.pow2()
    residue %= 3
    report = ObstructionReport(n_max, window, residue)
    col = Colouring(Domain(1, window), ResidueMod.with_map(3, {residue: 1}), 1)

    for n in range(1, n_max + 1):
        coefficient = seq.c(n)
        if coefficient.denominator != 1:
            raise ContractViolation("The residue argument needs integer coefficients")
        residual = (residue * int(coefficient)) % 3
        report.modular.append(ModularStep(n, int(coefficient), residual, residual != 0))

        system = generate_prefix(SystemFamily.SYSTEM_A, n, seq)
        found = find_mono_solution(system, col, search_bound=window, colours=[1], limits=limits)
        report.search.append(
            SearchStep(n, found is not None, found.assignment.to_dict() if found else None, found.nodes if found else 0)
        )

    report.agree = all(m.obstructed != s.found for m, s in zip(report.modular, report.search))
    report.obstructed = all(m.obstructed for m in report.modular) and not any(
        s.found for s in report.search
    )
    logger.info(
        f"Residue {residue} mod 3, n <= {n_max}: obstructed={report.obstructed}, agree={report.agree}"
    )
    return report


@dataclass
class ViolationReport:
    """
    Why an assignment is not monochromatic inside (-delta, delta) minus 0.

    Attributes:
        kind: "sign-split" or "escapes-interval"
        delta: Half-width of the interval
        n: Equation whose expression leaves the interval
        value: Value of expression n
        threshold: 2^n * y, already beyond delta
        mirrored: True when the values were all negative
        positive: Variables with positive values (sign-split only)
        negative: Variables with negative values (sign-split only)
        earlier: (n, value) of the expressions before n
    """

    kind: str
    delta: Fraction
    n: int = 0
    value: Fraction = Fraction(0)
    threshold: Fraction = Fraction(0)
    mirrored: bool = False
    positive: List[str] = field(default_factory=list)
    negative: List[str] = field(default_factory=list)
    earlier: List[Tuple[int, Fraction]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "delta": format_rational(self.delta),
            "n": self.n,
            "value": format_rational(self.value),
            "threshold": format_rational(self.threshold),
            "mirrored": self.mirrored,
            "positive": list(self.positive),
            "negative": list(self.negative),
            "earlier": [[n, format_rational(v)] for n, v in self.earlier],
        }


XValues = Union[RationalLike, Mapping[str, RationalLike]]


def _x_value(x: XValues, i: int, j: int) -> Fraction:
    if isinstance(x, Mapping):
        name = x_name(i, j)
        if name not in x:
            raise InvariantViolation(f"Assignment is missing variable {name}")
        return to_rational(x[name])
    return to_rational(x)


def verify_iprnz(delta: RationalLike, y: RationalLike, x: XValues) -> ViolationReport:
    """
    Show that an assignment inside (-delta, delta) minus 0 is not monochromatic
    for the System I expressions under the sign colouring.

    Mixed signs already split the values across both colours. Otherwise, with
    all values positive, 2^n * y exceeds delta for some n and expression n is
    larger still. All-negative assignments are negated first, and the
    expression is reported below -delta.

    Args:
        delta: Positive half-width
        y: Value of y
        x: One value for every x_{i,j}, or a mapping of x names to values

    Raises:
        InvariantViolation: On a zero value or a missing x_{n,j}
        ContractViolation: If delta <= 0 or some |value| >= delta
    """
    delta = to_rational(delta)
    if delta <= 0:
        raise ContractViolation(f"delta must be positive, got {delta}")
    y = to_rational(y)
    named = {"y": y}
    if isinstance(x, Mapping):
        named.update({k: to_rational(v) for k, v in x.items()})
    else:
        named["x"] = to_rational(x)
    for name, value in named.items():
        if value == 0:
            raise InvariantViolation(f"{name} has value 0; values must be non-zero")
        if abs(value) >= delta:
            raise ContractViolation(f"|{name}| = {abs(value)} is not below delta = {delta}")

    positive = sorted(k for k, v in named.items() if v > 0)
    negative = sorted(k for k, v in named.items() if v < 0)
    if positive and negative:
        logger.info(f"Sign split: {len(positive)} positive, {len(negative)} negative values")
        return ViolationReport("sign-split", delta, positive=positive, negative=negative)

    mirrored = bool(negative)
    sign = -1 if mirrored else 1
    y_pos = sign * y
    n = 1
    while (1 << n) * y_pos <= delta:
        n += 1

    def expression(i: int) -> Fraction:
        return sum((sign * _x_value(x, i, j) for j in range(1, i + 1)), Fraction(0)) + (1 << i) * y_pos

    earlier = [(i, sign * expression(i)) for i in range(1, n)]
    value = expression(n)
    if value <= delta:
        raise ContractViolation(f"Expression {n} = {value} does not exceed delta; values are not all one sign")
    report = ViolationReport(
        "escapes-interval",
        delta,
        n=n,
        value=sign * value,
        threshold=sign * (1 << n) * y_pos,
        mirrored=mirrored,
        earlier=earlier,
    )
    logger.info(f"Expression {n} = {report.value} leaves (-{delta}, {delta})")
    return report


@dataclass
class ImageEvaluation:
    """
    System I expressions evaluated exactly, and the System C check they pass.

    Attributes:
        rows: (expression name, value) in generation order
        system_c: Residuals of System C with z_i bound to the compound expressions
    """

    rows: List[Tuple[str, Fraction]]
    system_c: SolutionCheck

    def to_dict(self) -> dict:
        return {
            "rows": [[name, format_rational(v)] for name, v in self.rows],
            "system_c": self.system_c.to_dict(),
        }


def image_expressions(
    n: int,
    assignment: Union[Assignment, Mapping[str, RationalLike]],
    seq: Optional[CoefficientSequence] = None,
) -> ImageEvaluation:
    """
    Evaluate System I up to row n and feed the result into System C.

    Raises:
        InvariantViolation: On a missing variable or a zero value
    """
    check_positive(n, "n")
    values = assignment if isinstance(assignment, Assignment) else Assignment(assignment)
    names = image_variables(n)
    rows = evaluate_image_rows(names, generate_image_system(n, seq), values.values)
    bound = {name: values[name] for name in names}
    bound.update({name: value for name, value in rows if name.startswith("z_")})
    check = check_solution(generate_prefix(SystemFamily.SYSTEM_C, n, seq), Assignment(bound))
    return ImageEvaluation(rows, check)
