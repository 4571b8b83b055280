"""
Monochromatic solution search and bad-colouring search.

Both searches share one backtracking engine over integer numerators. Rows are
scaled to integer coefficients; a row with a single unassigned variable forces
that variable instead of enumerating it. Two cheap tests prune every node: all
values of a class agree modulo the gcd of their differences, and every
unassigned value lies between the class minimum and maximum.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from partreg_core.colouring.rules import Colouring, explicit_colouring
from partreg_core.logging import get_logger
from partreg_core.model.systems import Assignment, LinearSystem, SolutionCheck, check_solution
from partreg_core.sumsets.density import window_density
from partreg_core.validation import (
    ContractViolation,
    LimitExceeded,
    SearchLimits,
    check_colouring_space,
    check_positive,
    check_variable_count,
)

logger = get_logger(__name__)

IntRow = List[Tuple[int, int]]


@dataclass
class SolutionReport:
    """
    A monochromatic solution of a finite system.

    Attributes:
        assignment: Values of every system variable
        colour: The colour shared by all values
        check: Exact residuals of every row
        level: Dyadic level the values were searched at (0 over Z)
        nodes: Search nodes visited
    """

    assignment: Assignment
    colour: int
    check: SolutionCheck
    level: int = 0
    nodes: int = 0

    def to_dict(self) -> dict:
        return {
            "assignment": self.assignment.to_dict(),
            "colour": self.colour,
            "check": self.check.to_dict(),
            "level": self.level,
            "nodes": self.nodes,
        }


def integer_rows(system: LinearSystem) -> List[IntRow]:
    """Rows scaled by the lcm of their denominators, as sparse (variable, coefficient) lists."""
    rows = []
    for row in system.matrix.rows:
        scale = lcm(*(a.denominator for a in row))
        rows.append([(j, int(a * scale)) for j, a in enumerate(row) if a != 0])
    return rows


class _Backtracker:
    """
    Depth-first search for an integer point of a homogeneous system with all
    coordinates in one finite value set.

    Variables are branched in index order and values are tried by increasing
    absolute value, positive first, so the first solution found is the
    lexicographically least.
    """

    def __init__(
        self,
        rows: List[IntRow],
        num_vars: int,
        values: Sequence[int],
        distinct: bool = False,
        node_limit: int = 5_000_000,
    ):
        self.rows = rows
        self.num_vars = num_vars
        self.distinct = distinct
        self.node_limit = node_limit
        self.nodes = 0

        vals = np.asarray(sorted(set(int(v) for v in values)), dtype=np.int64)
        self.members = set(vals.tolist())
        if vals.size:
            order = np.lexsort((vals < 0, np.abs(vals)))
            self.order = vals[order].tolist()
            self.vmin, self.vmax = int(vals[0]), int(vals[-1])
            self.modulus = int(np.gcd.reduce(vals - vals[0])) if vals.size > 1 else 0
            self.residue = int(vals[0]) % self.modulus if self.modulus else int(vals[0])
        else:
            self.order = []
            self.vmin = self.vmax = self.modulus = self.residue = 0

        self.coeff: List[Dict[int, int]] = [dict(row) for row in rows]
        self.var_rows: List[List[int]] = [[] for _ in range(num_vars)]
        for r, row in enumerate(rows):
            for j, _ in row:
                self.var_rows[j].append(r)

        self.vals: List[Optional[int]] = [None] * num_vars
        self.row_sum = [0] * len(rows)
        self.row_free = [len(row) for row in rows]
        self.row_pos = [sum(a for _, a in row if a > 0) for row in rows]
        self.row_neg = [sum(a for _, a in row if a < 0) for row in rows]
        self.used: set = set()
        self.trail: List[int] = []

    def solve(self) -> Optional[List[int]]:
        """Lexicographically least solution, or None when there is none in the value set."""
        if not self.order:
            return None
        if not all(self._row_ok(r) for r in range(len(self.rows))):
            return None
        if self._search(list(range(self.num_vars))):
            return [int(v) for v in self.vals]
        return None

    def _row_ok(self, r: int) -> bool:
        s = self.row_sum[r]
        if self.row_free[r] == 0:
            return s == 0
        free_total = self.row_pos[r] + self.row_neg[r]
        t = s + self.residue * free_total
        if self.modulus:
            if t % self.modulus:
                return False
        elif t != 0:
            return False
        low = self.vmin * self.row_pos[r] + self.vmax * self.row_neg[r]
        high = self.vmax * self.row_pos[r] + self.vmin * self.row_neg[r]
        return low <= -s <= high

    def _set(self, var: int, value: int) -> None:
        self.vals[var] = value
        self.trail.append(var)
        if self.distinct:
            self.used.add(value)
        for r in self.var_rows[var]:
            a = self.coeff[r][var]
            self.row_sum[r] += a * value
            self.row_free[r] -= 1
            if a > 0:
                self.row_pos[r] -= a
            else:
                self.row_neg[r] -= a

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            var = self.trail.pop()
            value = self.vals[var]
            for r in self.var_rows[var]:
                a = self.coeff[r][var]
                self.row_sum[r] -= a * value
                self.row_free[r] += 1
                if a > 0:
                    self.row_pos[r] += a
                else:
                    self.row_neg[r] += a
            self.vals[var] = None
            if self.distinct:
                self.used.discard(value)

    def _assign(self, var: int, value: int) -> bool:
        queue = [(var, value)]
        while queue:
            v, val = queue.pop()
            if self.vals[v] is not None:
                if self.vals[v] != val:
                    return False
                continue
            if self.distinct and val in self.used:
                return False
            self._set(v, val)
            for r in self.var_rows[v]:
                if not self._row_ok(r):
                    return False
                if self.row_free[r] == 1:
                    u = next(j for j, _ in self.rows[r] if self.vals[j] is None)
                    b = self.coeff[r][u]
                    num = -self.row_sum[r]
                    if num % b:
                        return False
                    forced = num // b
                    if forced not in self.members:
                        return False
                    queue.append((u, forced))
        return True

    def _components(self, free: List[int]) -> List[List[int]]:
        free_set = set(free)
        seen: set = set()
        parts = []
        for start in free:
            if start in seen:
                continue
            seen.add(start)
            stack, part = [start], []
            while stack:
                v = stack.pop()
                part.append(v)
                for r in self.var_rows[v]:
                    for j, _ in self.rows[r]:
                        if j in free_set and j not in seen:
                            seen.add(j)
                            stack.append(j)
            parts.append(sorted(part))
        return parts

    def _search(self, scope: List[int]) -> bool:
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise LimitExceeded(f"Backtracking exceeded {self.node_limit} nodes")
        free = [v for v in scope if self.vals[v] is None]
        if not free:
            return True
        if not self.distinct:
            parts = self._components(free)
            if len(parts) > 1:
                return all(self._search(part) for part in parts)

        var, rest = free[0], free
        for value in self.order:
            mark = len(self.trail)
            if self._assign(var, value) and self._search(rest):
                return True
            self._undo(mark)
        return False


def _class_order(col: Colouring, level: int) -> List[int]:
    """Colours sorted by descending window density, ties to the lower colour."""
    keyed = []
    for colour in range(1, col.r + 1):
        members = col.class_set(colour, level)
        density = window_density(members) if members.hi >= 1 else Fraction(0)
        keyed.append((-density, colour))
    return [colour for _, colour in sorted(keyed)]


def find_mono_solution(
    system: LinearSystem,
    col: Colouring,
    search_bound: Optional[int] = None,
    distinct: bool = False,
    level: int = 0,
    colours: Optional[Sequence[int]] = None,
    limits: Optional[SearchLimits] = None,
) -> Optional[SolutionReport]:
    """
    Search each colour class for a solution of the system.

    Values are 2^-level * t with t a domain numerator, 0 < |t| <= search_bound.
    Classes are tried by descending window density; the first class holding a
    solution returns its lexicographically least one.

    Args:
        system: Finite homogeneous system
        col: Colouring to search
        search_bound: Largest |numerator| (default: the domain's extent)
        distinct: Require pairwise distinct values
        level: Dyadic level of the values
        colours: Restrict the search to these classes
        limits: Search caps

    Returns:
        SolutionReport, or None when no class holds a solution within the bound

    Raises:
        ContractViolation: If the bound exceeds the colouring's domain
        LimitExceeded: On too many variables or search nodes
    """
    limits = limits or SearchLimits()
    check_variable_count(len(system.variables), limits)
    domain = col.domain
    extent = max(abs(domain.lo), abs(domain.hi))
    bound = extent if search_bound is None else search_bound
    check_positive(bound, "search_bound")
    if bound > extent:
        raise ContractViolation(f"Search bound {bound} exceeds the colouring domain [{domain.lo}, {domain.hi}]")

    ts = domain.numerators()
    in_range = (ts != 0) & (np.abs(ts) <= bound)
    ts = ts[in_range]
    palette = col.level_colours(level)[in_range]
    rows = integer_rows(system)

    order = _class_order(col, level)
    if colours is not None:
        order = [c for c in order if c in set(colours)]
    total_nodes = 0
    for colour in order:
        values = ts[palette == colour]
        if values.size == 0:
            continue
        engine = _Backtracker(rows, len(system.variables), values, distinct, limits.max_search_nodes)
        solution = engine.solve()
        total_nodes += engine.nodes
        if solution is None:
            logger.debug(f"Colour {colour}: no solution within |t| <= {bound} ({engine.nodes} nodes)")
            continue
        scale = Fraction(1, 1 << level)
        assignment = Assignment({v: Fraction(t) * scale for v, t in zip(system.variables, solution)})
        check = check_solution(system, assignment)
        logger.info(f"Monochromatic solution in colour {colour} after {total_nodes} nodes")
        return SolutionReport(assignment, colour, check, level, total_nodes)
    logger.info(f"No monochromatic solution within |t| <= {bound} ({total_nodes} nodes)")
    return None


def class_has_solution(
    rows: List[IntRow],
    num_vars: int,
    values: Sequence[int],
    distinct: bool = False,
    node_limit: int = 5_000_000,
) -> bool:
    """True iff the value set holds a solution of the integer rows."""
    return _Backtracker(rows, num_vars, values, distinct, node_limit).solve() is not None


def search_bad_colouring(
    system: LinearSystem,
    r: int,
    n: int,
    distinct: bool = False,
    limits: Optional[SearchLimits] = None,
) -> Optional[Colouring]:
    """
    Look for an r-colouring of [1..n] with no monochromatic solution.

    Integers are coloured in increasing order; 1 gets colour 1 and a new
    colour is only opened as the next unused index. After each step the
    class that grew is searched exhaustively, so the first complete colouring
    reached is bad.

    Args:
        system: Finite homogeneous system
        r: Number of colours
        n: Window size
        distinct: Require pairwise distinct values in solutions
        limits: Search caps

    Returns:
        An explicit bad colouring, or None when every colouring of [1..n] has a
        monochromatic solution

    Raises:
        LimitExceeded: If r^n exceeds the colouring-space cap
    """
    check_positive(r, "r")
    check_positive(n, "n")
    limits = limits or SearchLimits()
    check_colouring_space(r, n, limits)
    check_variable_count(len(system.variables), limits)
    rows = integer_rows(system)
    num_vars = len(system.variables)

    classes: List[List[int]] = [[] for _ in range(r + 1)]
    colouring = [0] * (n + 1)
    visited = 0

    def extend(t: int, used: int) -> bool:
        nonlocal visited
        if t > n:
            return True
        for colour in range(1, min(used + 1, r) + 1):
            visited += 1
            classes[colour].append(t)
            colouring[t] = colour
            if not class_has_solution(rows, num_vars, classes[colour], distinct, limits.max_search_nodes):
                if extend(t + 1, max(used, colour)):
                    return True
            classes[colour].pop()
        return False

    found = extend(1, 0)
    logger.info(f"Bad-colouring search r={r}, N={n}: {'found' if found else 'none'} after {visited} steps")
    if not found:
        return None
    return explicit_colouring(colouring[1:], 1, r)


def is_bad_colouring(system: LinearSystem, col: Colouring, distinct: bool = False) -> bool:
    """True iff no class of an integer colouring holds a solution (exhaustive)."""
    return find_mono_solution(system, col, distinct=distinct) is None


def relabel(col: Colouring, permutation: Sequence[int]) -> Colouring:
    """Explicit colouring with colour c renamed to permutation[c-1]."""
    if sorted(permutation) != list(range(1, col.r + 1)):
        raise ContractViolation(f"{list(permutation)} is not a permutation of 1..{col.r}")
    colours = col.level_colours(0)
    return explicit_colouring([permutation[c - 1] for c in colours.tolist()], col.domain.lo, col.r)
