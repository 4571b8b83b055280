"""
Self-test: the acceptance checks, runnable from the CLI.

Each check returns a pass/fail entry with timing. Certificates produced along
the way are re-verified at the end, together with a deliberately corrupted
copy that must be rejected.
"""

import copy
import time
from fractions import Fraction
from math import ceil
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from partreg_core.cli.commands import solve_document
from partreg_core.colouring.search import search_bad_colouring
from partreg_core.config import EngineConfig
from partreg_core.ingestion.dsl import parse_system
from partreg_core.logging import get_logger
from partreg_core.model.ratlin import format_rational
from partreg_core.model.systems import (
    CoefficientSequence,
    LinearSystem,
    SystemFamily,
    image_variables,
)
from partreg_core.outputs import certificates
from partreg_core.outputs.verify import verify_document
from partreg_core.reasoning.columns import columns_property, matrix_family, verify_certificate
from partreg_core.reasoning.witnesses import image_expressions, verify_iprnz, verify_mod3_obstruction
from partreg_core.sumsets.density import window_density
from partreg_core.sumsets.stabilize import stabilize_asymmetric, stabilize_symmetric
from partreg_core.sumsets.windowset import WindowSet, iterate_sumset
from partreg_core.validation import SearchLimits

logger = get_logger(__name__)

Check = Callable[["SelftestContext"], str]


class SelftestContext:
    """Settings shared by the checks and the certificates they emit."""

    def __init__(self, config: EngineConfig, quick: bool):
        self.config = config
        self.quick = quick
        self.rng = np.random.default_rng(config.seed)
        self.artifacts: List[Dict[str, Any]] = []
        self.limits = SearchLimits()

    def pick(self, quick_value, full_value):
        return quick_value if self.quick else full_value


def _families(ctx: SelftestContext):
    small = matrix_family(1, 3, range(-2, 3))
    if ctx.quick:
        return small
    return small + matrix_family(2, 4, range(-2, 3))


def _system_of(matrix) -> LinearSystem:
    return LinearSystem(matrix, tuple(f"v{i + 1}" for i in range(matrix.ncols)))


def check_columns_soundness(ctx: SelftestContext) -> str:
    family = _families(ctx)
    positive = 0
    for matrix in family:
        cert = columns_property(matrix, ctx.limits.max_columns)
        ctx.artifacts.append(certificates.columns_document(matrix, cert))
        if cert is None:
            continue
        positive += 1
        if not verify_certificate(matrix, cert):
            raise AssertionError(f"certificate rejected for {matrix.to_dict()}")
    return f"{positive} of {len(family)} matrices have the property; every certificate verified"


def check_rado_cross(ctx: SelftestContext) -> str:
    family = _families(ctx)
    window = 12
    for matrix in family:
        regular = columns_property(matrix, ctx.limits.max_columns) is not None
        bad = search_bad_colouring(_system_of(matrix), 2, window, limits=ctx.limits)
        if regular and bad is not None:
            raise AssertionError(f"{matrix.to_dict()} has the property but a bad 2-colouring exists")
        if not regular and bad is None:
            raise AssertionError(f"{matrix.to_dict()} lacks the property but no bad 2-colouring of [1..{window}]")
    return f"{len(family)} matrices agree with bad-colouring search on [1..{window}]"


def check_schur(ctx: SelftestContext) -> str:
    system = parse_system("x + y = z")
    four = search_bad_colouring(system, 2, 4, limits=ctx.limits)
    five = search_bad_colouring(system, 2, 5, limits=ctx.limits)
    ctx.artifacts.append(certificates.bad_colouring_document(system, 2, 4, four))
    ctx.artifacts.append(certificates.bad_colouring_document(system, 2, 5, five))
    if four is None or five is not None:
        raise AssertionError("expected a bad colouring of [1..4] and none of [1..5]")
    return f"bad colouring of [1..4]: {four.level_colours(0).tolist()}; none of [1..5]"


def _random_symmetric(ctx: SelftestContext, window: int) -> WindowSet:
    q = int(ctx.rng.integers(1, 4))
    p = float(ctx.rng.uniform(0.35, 0.9))
    ts = np.arange(1, window + 1)
    keep = (ts % q == 0) & (ctx.rng.random(window) < p)
    members = ts[keep]
    both = np.concatenate([-members, [0], members])
    return WindowSet.from_members(both.tolist(), -window, window)


def check_symmetric_bound(ctx: SelftestContext) -> str:
    count = ctx.pick(20, 200)
    window = ctx.pick(10_000, 100_000)
    certified = 0
    for _ in range(count):
        s = _random_symmetric(ctx, window)
        density = window_density(s)
        if density < Fraction(1, 10):
            continue
        report = stabilize_symmetric(s, ctx.config)
        if not report.certified:
            continue
        certified += 1
        if report.K > ceil(2 / density) + 1:
            raise AssertionError(f"K={report.K} exceeds ceil(2/d)+1 for d={density}")
        stable = iterate_sumset(s, report.K, ctx.config.max_window_bits)
        probe = stable.slice_bits(report.probe_lo, report.probe_hi)
        lattice = np.arange(report.probe_lo, report.probe_hi + 1) % report.m == 0
        if not np.array_equal(probe, lattice):
            raise AssertionError(f"KS differs from {report.m}Z on the probe")
    if certified == 0:
        raise AssertionError("no certified stabilization among the samples")
    return f"{certified} of {count} certified runs satisfy the bound and recheck bit-for-bit"


def check_coset_law(ctx: SelftestContext) -> str:
    count = ctx.pick(20, 100)
    window = ctx.pick(4_000, 20_000)
    for _ in range(count):
        q = int(ctx.rng.integers(1, 5))
        a = int(ctx.rng.integers(0, q))
        p = float(ctx.rng.uniform(0.4, 0.9))
        ts = np.arange(1, window + 1)
        members = ts[(ts % q == a) & (ctx.rng.random(window) < p)]
        x, report = stabilize_asymmetric(WindowSet.from_members(members.tolist(), 1, window), config=ctx.config)
        bits = x.bits
        m = report.m
        if bits.size > m and not np.array_equal(bits[:-m], bits[m:]):
            raise AssertionError(f"A - kA is not a union of cosets of {m}Z")
    return f"{count} random dense sets give coset-closed A - kA"


def check_system_a(ctx: SelftestContext) -> str:
    document = solve_document(
        SystemFamily.SYSTEM_A, "mod:3", 4, config=ctx.config, limits=ctx.limits,
        window=ctx.pick(ctx.config.window, 2_000_000),
    )
    ctx.artifacts.append(document)
    return f"colour {document['solution']['colour']}, y = {document['solution']['assignment']['y']}"


def random_sequence(rng: np.random.Generator, length: int) -> CoefficientSequence:
    """c(k) drawn uniformly from [-2^k, 2^k] without zero."""
    magnitudes = [int(rng.integers(1, 2**k + 1)) for k in range(1, length + 1)]
    signs = rng.choice([-1, 1], size=length)
    return CoefficientSequence.custom(int(s) * v for s, v in zip(signs, magnitudes))


def check_coefficient_generality(ctx: SelftestContext) -> str:
    count = ctx.pick(3, 20)
    for _ in range(count):
        seq = random_sequence(ctx.rng, 3)
        document = solve_document(
            SystemFamily.SYSTEM_A, "mod:3", 3, seq, ctx.config, ctx.limits,
            window=ctx.pick(ctx.config.window, 2_000_000),
        )
        ctx.artifacts.append(document)
    return f"{count} random integer sequences solved"


def check_system_b(ctx: SelftestContext) -> str:
    levels = ctx.pick(ctx.config.levels, 25)
    document = solve_document(
        SystemFamily.SYSTEM_B, "mod:3", 3, config=ctx.config, limits=ctx.limits, levels=levels
    )
    ctx.artifacts.append(document)
    values = [Fraction(v) for v in document["solution"]["assignment"].values()]
    if any(v.denominator > 1 << (levels - 1) for v in values):
        raise AssertionError("a value lies below the deepest level")
    return f"largest denominator {max(v.denominator for v in values)}"


def check_system_c(ctx: SelftestContext) -> str:
    window = ctx.pick(ctx.config.window, 2_000_000)
    parity = solve_document(SystemFamily.SYSTEM_C, "mod:2", 3, config=ctx.config, limits=ctx.limits, window=window)
    residue = solve_document(SystemFamily.SYSTEM_C, "mod:3", 3, config=ctx.config, limits=ctx.limits, window=window)
    ctx.artifacts.extend([parity, residue])
    depth = parity["trace"]["recursion_depth"]
    if depth < 1:
        raise AssertionError("the odd/even colouring did not recurse into 2N")
    return f"odd/even recursion depth {depth}; mod-3 depth {residue['trace']['recursion_depth']}"


def check_mod3_obstruction(ctx: SelftestContext) -> str:
    report = verify_mod3_obstruction(4, ctx.pick(2_000, 10_000), limits=ctx.limits)
    ctx.artifacts.append(certificates.obstruction_document(report))
    if not (report.obstructed and report.agree):
        raise AssertionError(f"obstructed={report.obstructed}, agree={report.agree}")
    return "no solution by either check for n <= 4"


def check_iprnz(ctx: SelftestContext) -> str:
    delta, y, x = Fraction(1, 2), Fraction(1, 8), Fraction(1, 8)
    report = verify_iprnz(delta, y, x)
    ctx.artifacts.append(certificates.violation_document(report, y, x))
    if report.kind != "escapes-interval" or report.n != 3 or report.value != Fraction(11, 8):
        raise AssertionError(f"expected n=3 and 11/8, got {report.kind} n={report.n} {report.value}")
    split = verify_iprnz(delta, y, -x)
    ctx.artifacts.append(certificates.violation_document(split, y, -x))
    if split.kind != "sign-split":
        raise AssertionError("mixed signs did not give a sign split")

    values = {name: (y if name == "y" else x) for name in image_variables(3)}
    evaluation = image_expressions(3, values)
    ctx.artifacts.append(certificates.image_document(3, values, evaluation, CoefficientSequence.pow2()))
    return f"expression 3 = {format_rational(report.value)}; sign split on mixed input"


def _corrupt(documents: List[Dict[str, Any]]) -> Optional[Tuple[Dict[str, Any], str]]:
    for document in documents:
        if document["kind"] in ("solver-trace", "mono-solution") and document.get("solution"):
            bad = copy.deepcopy(document)
            assignment = bad["solution"]["assignment"]
            name = next(iter(assignment))
            assignment[name] = format_rational(Fraction(assignment[name]) + 1)
            return bad, name
    return None


def check_round_trip(ctx: SelftestContext) -> str:
    failed = [r for r in (verify_document(d) for d in ctx.artifacts) if not r.valid]
    if failed:
        raise AssertionError(f"{len(failed)} certificate(s) rejected: {failed[0].failures}")
    corrupted = _corrupt(ctx.artifacts)
    if corrupted is not None:
        result = verify_document(corrupted[0])
        if result.valid:
            raise AssertionError(f"corrupted value of {corrupted[1]} was accepted")
        control = result.failures[0]
    else:
        control = "no solution certificate to corrupt"
    return f"{len(ctx.artifacts)} certificates re-verified; corrupted copy rejected ({control})"


CHECKS: List[Tuple[str, Check, bool]] = [
    # (name, check, runs in quick mode)
    ("columns-property soundness", check_columns_soundness, True),
    ("Rado cross-check against bad-colouring search", check_rado_cross, True),
    ("Schur window values", check_schur, True),
    ("symmetric stabilization bound", check_symmetric_bound, True),
    ("coset law of A - kA", check_coset_law, True),
    ("System A on the mod-3 colouring", check_system_a, True),
    ("coefficient generality", check_coefficient_generality, False),
    ("System B on dyadic levels", check_system_b, True),
    ("System C with and without recursion", check_system_c, True),
    ("mod-3 obstruction", check_mod3_obstruction, True),
    ("sign colouring near zero", check_iprnz, True),
    ("certificate round-trip", check_round_trip, True),
]


def run_selftest(config: Optional[EngineConfig] = None, quick: bool = False) -> Dict[str, Any]:
    """
    Run the acceptance checks and collect a selftest certificate.

    Args:
        config: Engine configuration (quick runs default to EngineConfig.quick())
        quick: Reduced windows and sample sizes; slow checks are skipped

    Returns:
        "selftest" certificate with one entry per check
    """
    config = config or (EngineConfig.quick() if quick else EngineConfig())
    ctx = SelftestContext(config, quick)
    results = []
    for index, (name, check, in_quick) in enumerate(CHECKS, 1):
        if quick and not in_quick:
            results.append({"id": index, "name": name, "passed": True, "skipped": True, "detail": "skipped in quick mode", "seconds": 0.0})
            continue
        started = time.perf_counter()
        try:
            detail = check(ctx)
            passed = True
        except Exception as e:
            detail = f"{type(e).__name__}: {e}"
            passed = False
        seconds = round(time.perf_counter() - started, 3)
        logger.info(f"[{'PASS' if passed else 'FAIL'}] {index}. {name} ({seconds}s): {detail}")
        results.append({"id": index, "name": name, "passed": passed, "skipped": False, "detail": detail, "seconds": seconds})
    return certificates.selftest_document(results, quick)
