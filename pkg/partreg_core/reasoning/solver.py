"""
Constructive solver for Systems A, B and C.

Given a concrete colouring the solver finds a colour class holding a solution
of the first n equations:

1. Dense classes are stabilized: kA - kA (or A - kA for System C) settles to
   multiples of some m_i from an index K_i on.
2. With m = lcm(m_i) and K = max(K_i, 2), the first K - 1 equations form a
   finite system P. A progression (m*d)*[l] inside the dense classes is searched
   for a monochromatic solution of P, trying l = 2, 3, ... up to l_cap.
3. Every later equation k only asks for c(k)*y in kA - kA (A - kA for System C).
   y is a multiple of m, so a witness exists once k >= K; it is found by
   scanning the k-fold sumset of a class prefix.

System C first checks whether some class misses m*Z; if so it recurses on the
colouring induced on m*N, which has fewer colours.
"""

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from partreg_core.colouring.rules import Colouring
from partreg_core.colouring.search import SolutionReport, find_mono_solution
from partreg_core.config import EngineConfig
from partreg_core.logging import get_logger
from partreg_core.model.systems import (
    Assignment,
    CoefficientSequence,
    LinearSystem,
    SystemFamily,
    check_solution,
    default_sequence,
    generate_prefix,
    x_name,
    z_name,
)
from partreg_core.reasoning.extension import (
    ExtensionWitness,
    class_layers,
    difference_witness,
    single_witness,
)
from partreg_core.reasoning.trace import ClassSummary, SolverTrace
from partreg_core.sumsets.density import dyadic_dstar, window_density
from partreg_core.sumsets.progressions import ProgressionWitness, find_progression
from partreg_core.sumsets.stabilize import (
    stabilize_asymmetric,
    stabilize_dyadic,
    stabilize_symmetric,
)
from partreg_core.sumsets.windowset import WindowSet, difference
from partreg_core.validation import (
    ContractViolation,
    Inconclusive,
    InternalError,
    SearchLimits,
    check_positive,
)

logger = get_logger(__name__)


def target_values(
    family: SystemFamily, n: int, y: Fraction, seq: Optional[CoefficientSequence] = None
) -> List[Tuple[int, Fraction]]:
    """The right-hand targets c(k) * y for k = 1..n."""
    check_positive(n, "n")
    seq = seq or default_sequence(family)
    return [(k, seq.c(k) * y) for k in range(1, n + 1)]


# Class preparation


def _positive_class(col: Colouring, colour: int, level: int = 0) -> WindowSet:
    members = col.class_set(colour, level)
    if members.lo < 1:
        return members.truncate(1, members.hi)
    return members


def _prefix(a: WindowSet, length: int) -> WindowSet:
    return a.truncate(a.lo, min(a.hi, a.lo + length - 1))


def _good_set(col: Colouring, dense: Sequence[int], level: int = 0) -> WindowSet:
    bits = np.isin(col.level_colours(level), list(dense))
    good = WindowSet.finite(bits, col.domain.lo, level)
    return good.truncate(1, good.hi) if good.lo < 1 else good


def _parallel(config: EngineConfig, fn, items: Sequence):
    if config.threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _require_integer_colouring(col: Colouring) -> None:
    if col.domain.max_level != 0:
        raise ContractViolation("Systems A and C are solved on an integer colouring")
    if col.domain.hi < 1:
        raise ContractViolation("The colouring window holds no positive integer")


def _dense_integer_classes(
    col: Colouring, config: EngineConfig, trace: SolverTrace
) -> Dict[int, WindowSet]:
    classes = {}
    for colour in range(1, col.r + 1):
        members = _positive_class(col, colour)
        trace.densities[colour] = window_density(members)
        classes[colour] = members
    threshold = config.dense_threshold()
    trace.dense_classes = [c for c, d in trace.densities.items() if d > 0 and d >= threshold]
    if not trace.dense_classes:
        raise InternalError(
            f"No colour class reaches density {threshold}; a total colouring always has one"
        )
    logger.info(f"Dense classes {trace.dense_classes} at threshold {threshold}")
    return {c: classes[c] for c in trace.dense_classes}


# Prefix system


def _solve_prefix(
    p_system: LinearSystem,
    col: Colouring,
    dense: Sequence[int],
    m: int,
    config: EngineConfig,
    limits: Optional[SearchLimits],
    level: int = 0,
) -> Tuple[ProgressionWitness, SolutionReport]:
    """Monochromatic solution of P inside (m*d)*[l], for the least workable l."""
    good = _good_set(col, dense, level)
    for l in range(2, config.l_cap + 1):
        try:
            progression = find_progression(good, l, m)
        except ContractViolation as e:
            raise Inconclusive(f"Progression search starved: {e}", "progression")
        induced = col.induced(progression.step, l, level)
        report = find_mono_solution(p_system, induced, search_bound=l, colours=dense, limits=limits)
        if report is not None:
            logger.info(f"P solved in (m*d)*[{l}] with m={m}, d={progression.d}, level={level}")
            return progression, report
        logger.debug(f"No monochromatic solution of P in (m*d)*[{l}]")
    raise Inconclusive(
        f"No monochromatic solution of the first {p_system.num_equations} equations "
        f"in a progression of length <= {config.l_cap}",
        "prefix-system",
    )


def _scaled_prefix_values(
    report: SolutionReport, progression: ProgressionWitness
) -> Dict[str, Fraction]:
    step = Fraction(progression.step, 1 << progression.j)
    return {name: value * step for name, value in report.assignment.values.items()}


def _finish(
    col: Colouring,
    system: LinearSystem,
    values: Dict[str, Fraction],
    colour: int,
    trace: SolverTrace,
    level: int = 0,
    nodes: int = 0,
) -> Tuple[SolutionReport, SolverTrace]:
    assignment = Assignment(values)
    check = check_solution(system, assignment)
    if not check.all_zero:
        raise InternalError(f"Assembled values leave residuals {check.to_dict()['residuals']}")
    for name, value in assignment.values.items():
        if not col.domain.contains(value) or col.colour_of(value) != colour:
            raise InternalError(f"{name} = {value} is not in colour class {colour}")
    trace.colour = colour
    logger.info(f"{system.family.value}: verified solution of {system.num_equations} equations in colour {colour}")
    return SolutionReport(assignment, colour, check, level, nodes), trace


# System A


def _symmetric_summary(item: Tuple[int, WindowSet, Fraction, EngineConfig]) -> ClassSummary:
    colour, members, density, config = item
    prefix = _prefix(members, config.stabilize_window)
    report = stabilize_symmetric(difference(prefix, prefix, config.max_window_bits), config)
    return ClassSummary(colour, density, report.m, report.K, report.certified)


def _clip_note(trace: SolverTrace) -> None:
    if trace.n_target < trace.K:
        trace.notes.append(
            f"n_target={trace.n_target} < K={trace.K}: the whole prefix is solved as the finite system P"
        )


def solve_system_a(
    col: Colouring,
    n_target: int,
    seq: Optional[CoefficientSequence] = None,
    config: Optional[EngineConfig] = None,
    limits: Optional[SearchLimits] = None,
) -> Tuple[SolutionReport, SolverTrace]:
    """
    Monochromatic solution of the first n_target equations of System A.

    Args:
        col: Integer colouring of [1..N]
        n_target: Number of equations
        seq: y-coefficients (default powers of two)
        config: Engine configuration
        limits: Search caps for the prefix-system search

    Returns:
        (SolutionReport, SolverTrace)

    Raises:
        Inconclusive: If a window or progression length starves
        InternalError: If no class is dense or the assembled solution fails
    """
    check_positive(n_target, "n_target")
    _require_integer_colouring(col)
    config = config or EngineConfig()
    seq = seq or CoefficientSequence.pow2()
    trace = SolverTrace(SystemFamily.SYSTEM_A, n_target)

    dense = _dense_integer_classes(col, config, trace)
    items = [(c, dense[c], trace.densities[c], config) for c in trace.dense_classes]
    trace.per_class = _parallel(config, _symmetric_summary, items)
    trace.m = lcm(*(s.m for s in trace.per_class))
    trace.K = max(max(s.K for s in trace.per_class), 2)
    _clip_note(trace)

    full = generate_prefix(SystemFamily.SYSTEM_A, n_target, seq)
    trace.p_rows = min(trace.K - 1, n_target)
    p_system = full.restrict(trace.p_rows)
    progression, p_report = _solve_prefix(p_system, col, trace.dense_classes, trace.m, config, limits)
    trace.progression = progression
    values = _scaled_prefix_values(p_report, progression)
    trace.p_solution = dict(values)
    colour = p_report.colour

    if n_target > trace.p_rows:
        prefix = _prefix(dense[colour], config.extension_window)
        layers = class_layers(prefix, n_target, config.max_window_bits)
        y = values["y"]
        for k in range(trace.p_rows + 1, n_target + 1):
            target = seq.c(k) * y
            found = difference_witness(layers, k, int(target))
            if found is None:
                raise Inconclusive(
                    f"No witness for equation {k} (target {target}) in the first "
                    f"{config.extension_window} integers of colour {colour}",
                    "extension",
                )
            xs, zs = found
            for j in range(1, k + 1):
                values[x_name(k, j)] = Fraction(xs[j - 1])
                values[z_name(k, j)] = Fraction(zs[j - 1])
            trace.extensions.append(
                ExtensionWitness(k, target, tuple(map(Fraction, xs)), tuple(map(Fraction, zs)))
            )
    return _finish(col, full, values, colour, trace, nodes=p_report.nodes)


# System B


def _dyadic_summary(item: Tuple[int, List[WindowSet], Fraction, EngineConfig]) -> ClassSummary:
    colour, levels, dstar, config = item
    report = stabilize_dyadic(levels, config)
    return ClassSummary(colour, dstar, report.m, report.K, report.certified)


def solve_system_b(
    col: Colouring,
    n_target: int,
    seq: Optional[CoefficientSequence] = None,
    config: Optional[EngineConfig] = None,
    limits: Optional[SearchLimits] = None,
) -> Tuple[SolutionReport, SolverTrace]:
    """
    Monochromatic solution of the first n_target equations of System B.

    The colouring must cover levels 0..J of the dyadic rationals. The prefix
    system is solved at the shallowest level that leaves room below it; the
    witness for equation k is searched at a level deep enough to hold 2^-k * y.

    Raises:
        Inconclusive: On too few qualifying levels, level exhaustion or window starvation
        InternalError: If no class is dense or the assembled solution fails
    """
    check_positive(n_target, "n_target")
    if col.domain.lo < 1:
        raise ContractViolation("System B is solved on positive numerators")
    config = config or EngineConfig()
    seq = seq or CoefficientSequence.invpow2()
    trace = SolverTrace(SystemFamily.SYSTEM_B, n_target)
    top = col.domain.max_level

    per_level: Dict[int, List[WindowSet]] = {}
    for colour in range(1, col.r + 1):
        levels = [col.class_set(colour, j) for j in col.domain.levels]
        per_level[colour] = levels
        trace.densities[colour] = dyadic_dstar(levels)
    threshold = config.dense_threshold()
    trace.dense_classes = [c for c, d in trace.densities.items() if d > 0 and d >= threshold]
    if not trace.dense_classes:
        raise InternalError(f"No colour class reaches d* >= {threshold}")

    items = [(c, per_level[c], trace.densities[c], config) for c in trace.dense_classes]
    trace.per_class = _parallel(config, _dyadic_summary, items)
    trace.m = lcm(*(s.m for s in trace.per_class))
    trace.K = max(max(s.K for s in trace.per_class), 2)
    _clip_note(trace)

    full = generate_prefix(SystemFamily.SYSTEM_B, n_target, seq)
    trace.p_rows = min(trace.K - 1, n_target)
    p_system = full.restrict(trace.p_rows)
    needs_extension = n_target > trace.p_rows
    deepest_start = top - n_target if needs_extension else top
    if deepest_start < 0:
        raise Inconclusive(
            f"Equation {n_target} needs level >= {n_target} but the colouring stops at {top}",
            "level-exhaustion",
        )

    solved = None
    last_error: Optional[Inconclusive] = None
    for j in range(0, deepest_start + 1):
        try:
            solved = _solve_prefix(p_system, col, trace.dense_classes, trace.m, config, limits, level=j)
            break
        except Inconclusive as e:
            last_error = e
    if solved is None:
        assert last_error is not None
        raise last_error
    progression, p_report = solved
    trace.progression = progression
    trace.levels.append(progression.j)
    values = _scaled_prefix_values(p_report, progression)
    trace.p_solution = dict(values)
    colour = p_report.colour

    y = values["y"]
    layer_cache: Dict[int, list] = {}
    for k in range(trace.p_rows + 1, n_target + 1):
        target = seq.c(k) * y
        witness = None
        for level in range(progression.j + k, top + 1):
            numerator = target * (1 << level)
            if numerator.denominator != 1:
                continue
            if level not in layer_cache:
                layer_cache[level] = class_layers(per_level[colour][level], n_target, config.max_window_bits)
            found = difference_witness(layer_cache[level], k, int(numerator))
            if found is not None:
                witness = (level, found)
                break
        if witness is None:
            raise Inconclusive(
                f"No witness for equation {k} (target {target}) at levels "
                f"{progression.j + k}..{top}",
                "level-exhaustion",
            )
        level, (xs, zs) = witness
        scale = Fraction(1, 1 << level)
        for j in range(1, k + 1):
            values[x_name(k, j)] = xs[j - 1] * scale
            values[z_name(k, j)] = zs[j - 1] * scale
        trace.levels.append(level)
        trace.extensions.append(
            ExtensionWitness(
                k, target, tuple(x * scale for x in xs), tuple(z * scale for z in zs), level
            )
        )
    return _finish(col, full, values, colour, trace, level=top, nodes=p_report.nodes)


# System C


def _asymmetric_summary(item: Tuple[int, WindowSet, Fraction, EngineConfig]) -> ClassSummary:
    colour, members, density, config = item
    prefix = _prefix(members, config.stabilize_window)
    _, report = stabilize_asymmetric(prefix, config=config)
    return ClassSummary(colour, density, report.m, report.K, report.certified, report.residues)


def _missing_modulus(col: Colouring, moduli: Sequence[int]) -> Optional[int]:
    """Least candidate m such that some non-empty class holds no multiple of m."""
    colours = col.level_colours(0)
    ts = col.domain.numerators()
    present = [c for c in range(1, col.r + 1) if np.any((colours == c) & (ts >= 1))]
    for m in sorted(set(moduli)):
        if m < 2:
            continue
        multiples = (ts >= 1) & (np.mod(ts, m) == 0)
        hit = set(int(c) for c in np.unique(colours[multiples]))
        missing = [c for c in present if c not in hit]
        if missing:
            logger.info(f"Colours {missing} hold no multiple of {m}")
            return m
    return None


def solve_system_c(
    col: Colouring,
    n_target: int,
    seq: Optional[CoefficientSequence] = None,
    config: Optional[EngineConfig] = None,
    limits: Optional[SearchLimits] = None,
    _depth: int = 0,
) -> Tuple[SolutionReport, SolverTrace]:
    """
    Monochromatic solution of the first n_target equations of System C.

    If some colour class holds no multiple of a stabilization modulus m, the
    colouring induced on m*N uses fewer colours and the solver recurses on it,
    scaling the child's solution by m. Otherwise every class meets m*Z and the
    extension for equation k is a z in the class with z - c(k)*y in kA.

    Raises:
        Inconclusive: If a window or progression length starves
        InternalError: If recursion runs deeper than the number of colours
    """
    check_positive(n_target, "n_target")
    _require_integer_colouring(col)
    config = config or EngineConfig()
    seq = seq or CoefficientSequence.pow2()
    trace = SolverTrace(SystemFamily.SYSTEM_C, n_target)

    dense = _dense_integer_classes(col, config, trace)
    items = [(c, dense[c], trace.densities[c], config) for c in trace.dense_classes]
    trace.per_class = _parallel(config, _asymmetric_summary, items)
    trace.m = lcm(*(s.m for s in trace.per_class))
    trace.K = max(max(s.K for s in trace.per_class), 2)

    full = generate_prefix(SystemFamily.SYSTEM_C, n_target, seq)
    # A class without multiples of m always recurses; mod 3 descends once, into 3N
    modulus = _missing_modulus(col, [s.m for s in trace.per_class] + [trace.m])
    if modulus is not None:
        if _depth + 1 > col.r:
            raise InternalError(f"Induction depth {_depth + 1} exceeds r={col.r}; window artifacts")
        length = col.domain.hi // modulus
        if length < 1:
            raise Inconclusive(f"Window too small to induce a colouring on {modulus}*N", "recursion")
        induced = col.induced(modulus, length)
        logger.info(f"Recursing on the colouring induced on {modulus}*N (depth {_depth + 1})")
        child_report, child_trace = solve_system_c(induced, n_target, seq, config, limits, _depth + 1)
        trace.child = child_trace
        trace.recursion_depth = child_trace.recursion_depth + 1
        trace.recursion_moduli = [modulus] + child_trace.recursion_moduli
        values = {k: v * modulus for k, v in child_report.assignment.values.items()}
        return _finish(col, full, values, child_report.colour, trace, nodes=child_report.nodes)

    _clip_note(trace)
    trace.p_rows = min(trace.K - 1, n_target)
    p_system = full.restrict(trace.p_rows)
    progression, p_report = _solve_prefix(p_system, col, trace.dense_classes, trace.m, config, limits)
    trace.progression = progression
    values = _scaled_prefix_values(p_report, progression)
    trace.p_solution = dict(values)
    colour = p_report.colour

    if n_target > trace.p_rows:
        summary = next(s for s in trace.per_class if s.colour == colour)
        if summary.residues is not None and 0 not in summary.residues:
            raise Inconclusive(f"A - kA of colour {colour} misses the zero coset", "coset")
        prefix = _prefix(dense[colour], config.extension_window)
        layers = class_layers(prefix, n_target, config.max_window_bits)
        y = values["y"]
        for k in range(trace.p_rows + 1, n_target + 1):
            target = seq.c(k) * y
            found = single_witness(layers, k, int(target))
            if found is None:
                raise Inconclusive(
                    f"No witness for equation {k} (target {target}) in the first "
                    f"{config.extension_window} integers of colour {colour}",
                    "extension",
                )
            xs, z = found
            for j in range(1, k + 1):
                values[x_name(k, j)] = Fraction(xs[j - 1])
            values[z_name(k)] = Fraction(z)
            trace.extensions.append(
                ExtensionWitness(k, target, tuple(map(Fraction, xs)), (Fraction(z),))
            )
    return _finish(col, full, values, colour, trace, nodes=p_report.nodes)


def solve(
    family: SystemFamily,
    col: Colouring,
    n_target: int,
    seq: Optional[CoefficientSequence] = None,
    config: Optional[EngineConfig] = None,
    limits: Optional[SearchLimits] = None,
) -> Tuple[SolutionReport, SolverTrace]:
    """Dispatch to the solver of a family."""
    solvers = {
        SystemFamily.SYSTEM_A: solve_system_a,
        SystemFamily.SYSTEM_B: solve_system_b,
        SystemFamily.SYSTEM_C: solve_system_c,
    }
    if family not in solvers:
        raise ContractViolation(f"No constructive solver for {family.value}")
    return solvers[family](col, n_target, seq, config, limits)


def recheck_trace(
    col: Colouring,
    trace: SolverTrace,
    config: Optional[EngineConfig] = None,
) -> List[str]:
    """
    Re-derive every recorded step of a solver trace from the colouring.

    Per-class (m_i, K_i) are recomputed by a fresh stabilization run; the
    progression, the P-solution and every extension witness are checked against
    the colour classes. Recursive traces are rechecked on the induced colouring.

    Returns:
        Descriptions of the steps that failed (empty when everything holds)
    """
    config = config or EngineConfig()
    problems: List[str] = []
    if trace.child is not None:
        modulus = trace.recursion_moduli[0]
        induced = col.induced(modulus, col.domain.hi // modulus)
        return [f"depth {trace.recursion_depth}: {p}" for p in recheck_trace(induced, trace.child, config)]

    for summary in trace.per_class:
        if trace.family == SystemFamily.SYSTEM_B:
            levels = [col.class_set(summary.colour, j) for j in col.domain.levels]
            fresh = _dyadic_summary((summary.colour, levels, summary.density, config))
        elif trace.family == SystemFamily.SYSTEM_C:
            members = _positive_class(col, summary.colour)
            fresh = _asymmetric_summary((summary.colour, members, summary.density, config))
        else:
            members = _positive_class(col, summary.colour)
            fresh = _symmetric_summary((summary.colour, members, summary.density, config))
        if (fresh.m, fresh.K) != (summary.m, summary.K):
            problems.append(
                f"colour {summary.colour}: recorded (m, K)=({summary.m}, {summary.K}), "
                f"fresh run gives ({fresh.m}, {fresh.K})"
            )

    progression = trace.progression
    if progression is not None:
        colours = col.colours_of(progression.numerators(), progression.j)
        if not all(int(c) in trace.dense_classes for c in colours):
            problems.append("progression leaves the dense classes")
        step = Fraction(progression.step, 1 << progression.j)
        for name, value in trace.p_solution.items():
            u = value / step
            if u.denominator != 1 or not 1 <= u <= progression.l:
                problems.append(f"P-solution value {name}={value} is outside (m*d)*[l]")
            if (value * (1 << progression.j)) % trace.m != 0:
                problems.append(f"P-solution value {name}={value} is not divisible by m={trace.m}")
            if col.colour_of(value) != trace.colour:
                problems.append(f"P-solution value {name}={value} has the wrong colour")

    for witness in trace.extensions:
        if trace.family == SystemFamily.SYSTEM_C:
            balance = witness.zs[0] - sum(witness.xs)
        else:
            balance = sum(witness.zs) - sum(witness.xs)
        if balance != witness.target:
            problems.append(f"equation {witness.k}: witness sums differ by {balance}, not {witness.target}")
        if any(col.colour_of(v) != trace.colour for v in witness.xs + witness.zs):
            problems.append(f"equation {witness.k}: witness leaves colour {trace.colour}")
    return problems
