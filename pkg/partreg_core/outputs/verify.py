"""
Independent re-verification of emitted certificates.

The checks here recompute residuals, colours and sums directly from the JSON
with Fraction arithmetic. They do not go through the search, solver or
stabilization code that produced the certificate, except where a claim of
absence is too large to enumerate (noted in the result).
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from partreg_core.logging import get_logger

logger = get_logger(__name__)

# Largest product of class sizes enumerated directly when rechecking a bad colouring.
BRUTE_FORCE_LIMIT = 2_000_000


@dataclass
class VerificationResult:
    """
    Outcome of re-verifying one certificate.

    Attributes:
        kind: Certificate kind
        valid: True when no invariant failed
        failures: Named invariants that failed, with details
        notes: Checks that were delegated or skipped
    """

    kind: str
    valid: bool = True
    failures: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def fail(self, invariant: str, detail: str = "") -> None:
        self.valid = False
        self.failures.append(f"{invariant}: {detail}" if detail else invariant)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "valid": self.valid,
            "failures": list(self.failures),
            "notes": list(self.notes),
        }


# Shared arithmetic


def _q(text: Any) -> Fraction:
    return Fraction(str(text))


def _rows(system: Dict[str, Any]) -> List[List[Fraction]]:
    return [[_q(a) for a in row] for row in system["rows"]]


def _residuals(system: Dict[str, Any], values: Dict[str, Fraction]) -> List[Fraction]:
    names = system["variables"]
    return [sum((a * values[v] for a, v in zip(row, names)), Fraction(0)) for row in _rows(system)]


def _check_residuals(result: VerificationResult, system: Dict[str, Any], values: Dict[str, Fraction]) -> None:
    missing = [v for v in system["variables"] if v not in values]
    if missing:
        result.fail("assignment-complete", f"missing {', '.join(missing)}")
        return
    zeros = [name for name, value in values.items() if value == 0]
    if zeros:
        result.fail("values-nonzero", ", ".join(zeros))
    for i, residual in enumerate(_residuals(system, values)):
        if residual != 0:
            result.fail("residuals-zero", f"row {i + 1} leaves {residual}")


class _Recolour:
    """Colour of a rational under a serialized colouring."""

    def __init__(self, colouring: Dict[str, Any]):
        self.spec = colouring["spec"]
        domain = colouring["domain"]
        self.lo, self.hi, self.max_level = domain["lo"], domain["hi"], domain["max_level"]
        self.kind, _, self.rest = self.spec.partition(":")

    def in_domain(self, x: Fraction) -> bool:
        level = x.denominator.bit_length() - 1
        if x.denominator != 1 << level or level > self.max_level:
            return False
        return any(self.lo <= x * (1 << j) <= self.hi for j in range(level, self.max_level + 1))

    def __call__(self, x: Fraction) -> int:
        t, level = x.numerator, x.denominator.bit_length() - 1
        if self.kind == "mod":
            q_text, _, map_text = self.rest.partition(":")
            q = int(q_text)
            if not map_text:
                return t % q + 1
            table = dict(item.split("=") for item in map_text.split(","))
            return int(table.get(str(t % q), 0))
        if self.kind == "sign":
            return 1 if t > 0 else 2
        if self.kind == "level":
            return level % int(self.rest or 2) + 1
        if self.kind == "explicit":
            start_text, _, values_text = self.rest.partition(":")
            values = values_text.split(",")
            idx = t - int(start_text)
            return int(values[idx]) if level == 0 and 0 <= idx < len(values) else 0
        raise ValueError(f"Cannot recolour spec {self.spec!r}")


def _check_colours(
    result: VerificationResult, colouring: Dict[str, Any], values: Sequence[Fraction], colour: int
) -> None:
    recolour = _Recolour(colouring)
    for value in values:
        if not recolour.in_domain(value):
            result.fail("inside-domain", f"{value} is outside the coloured window")
        elif recolour(value) != colour:
            result.fail("monochromatic", f"{value} has colour {recolour(value)}, not {colour}")


# Rational span and rank


def _rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    rows = [list(v) for v in vectors]
    rank = 0
    width = len(rows[0]) if rows else 0
    for col in range(width):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col] / rows[rank][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _in_span(vectors: List[List[Fraction]], target: List[Fraction]) -> bool:
    if all(t == 0 for t in target):
        return True
    if not vectors:
        return False
    return _rank(vectors + [target]) == _rank(vectors)


def _column_sum(columns: List[List[Fraction]], part: Sequence[int]) -> List[Fraction]:
    return [sum((columns[i][r] for i in part), Fraction(0)) for r in range(len(columns[0]))]


def _has_ordered_partition(columns: List[List[Fraction]]) -> bool:
    """Exhaustive search for an ordered partition, with full backtracking."""
    n = len(columns)
    seen: Dict[frozenset, bool] = {}

    def subsets(pool: Sequence[int]):
        for size in range(1, len(pool) + 1):
            yield from itertools.combinations(pool, size)

    def extend(used: List[int]) -> bool:
        key = frozenset(used)
        if key not in seen:
            pool = [i for i in range(n) if i not in key]
            span = [columns[i] for i in used]
            seen[key] = not pool or any(
                _in_span(span, _column_sum(columns, part)) and extend(used + list(part))
                for part in subsets(pool)
            )
        return seen[key]

    return any(
        all(v == 0 for v in _column_sum(columns, first)) and extend(list(first))
        for first in subsets(list(range(n)))
    )


# Per-kind checks


def _verify_columns(doc: Dict[str, Any], result: VerificationResult) -> None:
    rows = [[_q(a) for a in row] for row in doc["matrix"]["rows"]]
    n = len(rows[0]) if rows else 0
    columns = [[row[i] for row in rows] for i in range(n)]
    cert = doc.get("certificate")
    if not doc["has_property"]:
        if cert is not None:
            result.fail("certificate-absent", "negative verdict carries a certificate")
        if n <= 8:
            if _has_ordered_partition(columns):
                result.fail("no-partition", "an ordered partition exists")
        else:
            result.notes.append(f"absence not enumerated for {n} columns")
        return
    if cert is None:
        result.fail("certificate-present", "positive verdict without a certificate")
        return
    parts = [list(p) for p in cert["parts"]]
    flat = [i for p in parts for i in p]
    if any(not 0 <= i < n for i in flat):
        result.fail("indices-in-range")
        return
    if sorted(flat) != list(range(n)) or any(not p for p in parts):
        result.fail("partition", "parts must be non-empty and cover every column once")
        return
    if any(v != 0 for v in _column_sum(columns, parts[0])):
        result.fail("first-part-zero-sum")
    witnesses = cert["witnesses"]
    if len(witnesses) != len(parts) - 1:
        result.fail("witness-count", f"{len(witnesses)} witnesses for {len(parts)} parts")
        return
    for t in range(1, len(parts)):
        earlier = [i for p in parts[:t] for i in p]
        coeffs = [_q(c) for c in witnesses[t - 1]]
        if len(coeffs) != len(earlier):
            result.fail("witness-recombination", f"part {t + 1} has {len(coeffs)} coefficients")
            continue
        combo = [sum((c * columns[i][r] for c, i in zip(coeffs, earlier)), Fraction(0)) for r in range(len(rows))]
        if combo != _column_sum(columns, parts[t]):
            result.fail("witness-recombination", f"part {t + 1}")


def _class_solvable(system: Dict[str, Any], members: List[int], distinct: bool) -> Optional[bool]:
    names = system["variables"]
    if prod([len(members)] * len(names)) > BRUTE_FORCE_LIMIT:
        return None
    rows = _rows(system)
    for combo in itertools.product(members, repeat=len(names)):
        if distinct and len(set(combo)) != len(combo):
            continue
        if all(sum((a * v for a, v in zip(row, combo)), Fraction(0)) == 0 for row in rows):
            return True
    return False


def _verify_bad_colouring(doc: Dict[str, Any], result: VerificationResult) -> None:
    if not doc["found"]:
        result.notes.append("absence of a bad colouring is not re-enumerated")
        return
    colours = doc["colours"]
    if len(colours) != doc["N"] or any(not 1 <= c <= doc["r"] for c in colours):
        result.fail("colouring-total", f"need {doc['N']} colours in 1..{doc['r']}")
        return
    for colour in sorted(set(colours)):
        members = [t for t, c in enumerate(colours, 1) if c == colour]
        solvable = _class_solvable(doc["system"], members, doc.get("distinct", False))
        if solvable is None:
            from partreg_core.colouring.rules import explicit_colouring
            from partreg_core.colouring.search import find_mono_solution
            from partreg_core.model.systems import LinearSystem

            system = LinearSystem.from_dict(doc["system"])
            col = explicit_colouring(colours, 1, doc["r"])
            solvable = find_mono_solution(system, col, distinct=doc.get("distinct", False), colours=[colour]) is not None
            result.notes.append(f"colour {colour} checked by search")
        if solvable:
            result.fail("no-monochromatic-solution", f"colour {colour} holds a solution")


def _solution_values(solution: Dict[str, Any]) -> Dict[str, Fraction]:
    return {k: _q(v) for k, v in solution["assignment"].items()}


def _verify_mono_solution(doc: Dict[str, Any], result: VerificationResult) -> None:
    if not doc["found"]:
        result.notes.append("absence of a solution is not re-enumerated")
        return
    solution = doc["solution"]
    values = _solution_values(solution)
    _check_residuals(result, doc["system"], values)
    _check_colours(result, doc["colouring"], list(values.values()), solution["colour"])
    bound = doc.get("bound")
    if bound is not None:
        scale = 1 << solution.get("level", 0)
        if any(abs(v * scale) > bound for v in values.values()):
            result.fail("within-bound", f"a value exceeds the search bound {bound}")
    if doc.get("distinct") and len(set(values.values())) != len(values):
        result.fail("distinct-values")


def _verify_trace_witnesses(trace: Dict[str, Any], colour: int, family: str, result: VerificationResult) -> None:
    for witness in trace["extensions"]:
        xs = [_q(x) for x in witness["xs"]]
        zs = [_q(z) for z in witness["zs"]]
        balance = (zs[0] if family == "SystemC" else sum(zs, Fraction(0))) - sum(xs, Fraction(0))
        if balance != _q(witness["target"]):
            result.fail("extension-balance", f"equation {witness['k']}")
    if trace.get("child"):
        _verify_trace_witnesses(trace["child"], colour, family, result)


def _verify_solver_trace(doc: Dict[str, Any], result: VerificationResult) -> None:
    solution = doc["solution"]
    values = _solution_values(solution)
    _check_residuals(result, doc["system"], values)
    _check_colours(result, doc["colouring"], list(values.values()), solution["colour"])
    trace = doc["trace"]
    if len(doc["system"]["rows"]) != trace["n_target"]:
        result.fail("equation-count", f"{len(doc['system']['rows'])} rows for n={trace['n_target']}")
    for name, value in trace["p_solution"].items():
        if name in values and values[name] != _q(value) and not trace.get("child"):
            result.fail("p-solution-embedded", name)
    _verify_trace_witnesses(trace, solution["colour"], trace["family"], result)


def _verify_stabilization(doc: Dict[str, Any], result: VerificationResult) -> None:
    from partreg_core.config import EngineConfig
    from partreg_core.ingestion.specs import stabilize_spec

    report = doc["report"]
    config = EngineConfig.from_dict(doc.get("config", {}))
    fresh = stabilize_spec(
        doc["set"], doc["window"], doc["mode"], doc.get("levels", 1), doc.get("k"), config
    ).to_dict()
    result.notes.append("recomputed by a fresh stabilization run")
    for key in ("m", "K", "certified"):
        if fresh[key] != report[key]:
            result.fail(f"stable-{key}", f"recorded {report[key]}, recomputed {fresh[key]}")
    if "residues" in report and fresh["residues"] != report["residues"]:
        result.fail("coset-residues", f"recorded {report['residues']}, recomputed {fresh['residues']}")


def _verify_mod3(doc: Dict[str, Any], result: VerificationResult) -> None:
    residue = doc["residue"]
    for step in doc["modular"]:
        expected = (residue * step["coefficient"]) % 3
        if step["residual_mod3"] != expected or step["obstructed"] != (expected != 0):
            result.fail("modular-residual", f"equation {step['n']}")
    for step in doc["search"]:
        if step["found"]:
            values = {k: _q(v) for k, v in step["solution"].items()}
            if any(v.denominator != 1 or v % 3 != residue for v in values.values()):
                result.fail("residue-class", f"prefix {step['n']} solution leaves the class")
    agree = all(m["obstructed"] != s["found"] for m, s in zip(doc["modular"], doc["search"]))
    if agree != doc["agree"]:
        result.fail("checks-agree", f"recorded {doc['agree']}, recomputed {agree}")


def _verify_iprnz(doc: Dict[str, Any], result: VerificationResult) -> None:
    given = doc["input"]
    delta, y = _q(given["delta"]), _q(given["y"])
    report = doc["report"]
    x = given["x"]
    if isinstance(x, dict):
        named = {"y": y, **{k: _q(v) for k, v in x.items()}}
    else:
        named = {"y": y, "x": _q(x)}
    signs = {v > 0 for v in named.values()}
    if report["kind"] == "sign-split":
        if len(signs) != 2:
            result.fail("sign-split", "all values share one sign")
        return
    n = report["n"]

    def x_value(i: int, j: int) -> Fraction:
        return named[f"x_{i}_{j}"] if isinstance(x, dict) else named["x"]

    value = sum((x_value(n, j) for j in range(1, n + 1)), Fraction(0)) + (1 << n) * y
    if value != _q(report["value"]):
        result.fail("expression-value", f"recomputed {value}")
    if abs(value) <= delta:
        result.fail("escapes-interval", f"|{value}| does not exceed {delta}")
    if abs((1 << (n - 1)) * y) > delta:
        result.fail("least-n", f"an earlier threshold already exceeds {delta}")


def _verify_image(doc: Dict[str, Any], result: VerificationResult) -> None:
    n = doc["n"]
    values = {k: _q(v) for k, v in doc["assignment"].items()}
    sequence = doc["sequence"]
    rows = {name: _q(v) for name, v in doc["rows"]}
    for i in range(1, n + 1):
        if sequence["kind"] == "custom":
            c = _q(sequence["values"][i - 1])
        else:
            c = Fraction(2) ** (i if sequence["kind"] == "pow2" else -i)
        compound = sum((values[f"x_{i}_{j}"] for j in range(1, i + 1)), Fraction(0)) + c * values["y"]
        if rows.get(f"z_{i}") != compound:
            result.fail("image-row", f"z_{i}")
    if not doc["system_c"]["all_zero"] or any(_q(r) != 0 for r in doc["system_c"]["residuals"]):
        result.fail("system-c-solution")


def _verify_selftest(doc: Dict[str, Any], result: VerificationResult) -> None:
    passed = all(c["passed"] for c in doc["criteria"])
    if passed != doc["passed"]:
        result.fail("summary-consistent")
    for criterion in doc["criteria"]:
        if not criterion["passed"]:
            result.fail("criterion-passed", criterion["name"])


_CHECKS: Dict[str, Callable[[Dict[str, Any], VerificationResult], None]] = {
    "columns-certificate": _verify_columns,
    "bad-colouring": _verify_bad_colouring,
    "mono-solution": _verify_mono_solution,
    "stabilization-report": _verify_stabilization,
    "coset-report": _verify_stabilization,
    "solver-trace": _verify_solver_trace,
    "mod3-obstruction": _verify_mod3,
    "iprnz-violation": _verify_iprnz,
    "image-expressions": _verify_image,
    "selftest": _verify_selftest,
}


def verify_document(doc: Dict[str, Any]) -> VerificationResult:
    """
    Re-verify a certificate document.

    Malformed documents are reported as a failed "well-formed" invariant
    rather than raised.
    """
    kind = doc.get("kind", "")
    result = VerificationResult(kind)
    if doc.get("schema") != "v1":
        result.fail("schema", f"expected 'v1', found {doc.get('schema')!r}")
        return result
    check = _CHECKS.get(kind)
    if check is None:
        result.fail("kind", f"unknown kind {kind!r}")
        return result
    try:
        check(doc, result)
    except (KeyError, IndexError, TypeError, ValueError, ZeroDivisionError) as e:
        result.fail("well-formed", f"{type(e).__name__}: {e}")
    if result.valid:
        logger.info(f"{kind}: valid")
    else:
        logger.warning(f"{kind}: {len(result.failures)} failed invariant(s): {result.failures[0]}")
    return result


def verify_documents(docs: Sequence[Dict[str, Any]]) -> Tuple[bool, List[VerificationResult]]:
    results = [verify_document(doc) for doc in docs]
    return all(r.valid for r in results), results
