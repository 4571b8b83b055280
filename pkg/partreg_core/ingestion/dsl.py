"""
Equation text parser: turn "lhs = rhs" lines into a LinearSystem.

Grammar (one equation per line, '#' starts a comment):

    equation := sum "=" sum
    sum      := ["+"|"-"] term (("+"|"-") term)*
    term     := rational ["*"] identifier | identifier | rational
    rational := integer ["/" positive-integer]

Both ASCII '-' and the unicode minus are accepted.
"""

import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from partreg_core.logging import get_logger
from partreg_core.model.ratlin import RatMatrix
from partreg_core.model.systems import LinearSystem, SystemFamily
from partreg_core.validation import SystemSyntaxError

logger = get_logger(__name__)

_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>\d+(?:/\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[+\-−=*])"
)


@dataclass
class _Token:
    kind: str
    text: str
    column: int


def _tokenize(line: str, line_no: int) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(line):
        match = _TOKEN.match(line, pos)
        if match is None:
            raise SystemSyntaxError(f"unexpected character {line[pos]!r}", line_no, pos + 1)
        kind = match.lastgroup or ""
        if kind != "ws":
            text = match.group()
            if text == "−":
                text = "-"
            tokens.append(_Token(kind, text, pos + 1))
        pos = match.end()
    return tokens


class _LineParser:
    """Recursive-descent parser for a single equation."""

    def __init__(self, tokens: List[_Token], line_no: int, line_length: int):
        self.tokens = tokens
        self.pos = 0
        self.line_no = line_no
        self.end_column = line_length + 1

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def error(self, message: str) -> SystemSyntaxError:
        token = self.peek()
        column = token.column if token else self.end_column
        return SystemSyntaxError(message, self.line_no, column)

    def equation(self) -> Tuple[List[Tuple[str, Fraction]], Fraction]:
        lhs, lhs_const = self.sum()
        token = self.peek()
        if token is None or token.text != "=":
            raise self.error("expected '='")
        self.advance()
        rhs, rhs_const = self.sum()
        if self.peek() is not None:
            raise self.error(f"unexpected {self.peek().text!r}")
        terms = lhs + [(name, -coeff) for name, coeff in rhs]
        return terms, lhs_const - rhs_const

    def sum(self) -> Tuple[List[Tuple[str, Fraction]], Fraction]:
        terms: List[Tuple[str, Fraction]] = []
        constant = Fraction(0)
        sign = 1
        token = self.peek()
        if token is not None and token.text in "+-":
            sign = -1 if token.text == "-" else 1
            self.advance()
        while True:
            name, coeff = self.term()
            if name is None:
                constant += sign * coeff
            else:
                terms.append((name, sign * coeff))
            token = self.peek()
            if token is None or token.text not in "+-":
                return terms, constant
            sign = -1 if token.text == "-" else 1
            self.advance()

    def term(self) -> Tuple[Optional[str], Fraction]:
        token = self.peek()
        if token is None:
            raise self.error("expected a term")
        if token.kind == "ident":
            self.advance()
            return token.text, Fraction(1)
        if token.kind != "num":
            raise self.error(f"expected a term, found {token.text!r}")
        self.advance()
        num, _, den = token.text.partition("/")
        if den and int(den) == 0:
            raise SystemSyntaxError("denominator must be positive", self.line_no, token.column)
        coeff = Fraction(int(num), int(den) if den else 1)
        nxt = self.peek()
        if nxt is not None and nxt.text == "*":
            self.advance()
            nxt = self.peek()
            if nxt is None or nxt.kind != "ident":
                raise self.error("expected a variable after '*'")
        if nxt is not None and nxt.kind == "ident":
            self.advance()
            return nxt.text, coeff
        return None, coeff


def parse_system(text: str, family: SystemFamily = SystemFamily.CUSTOM) -> LinearSystem:
    """
    Parse equation text into a LinearSystem.

    Each "lhs = rhs" becomes the row lhs - rhs = 0; variables are ordered by first
    appearance; coefficients are exact rationals. Repeated variables in one
    equation are combined.

    Args:
        text: Equation text, one equation per line
        family: Provenance tag for the result

    Returns:
        Parsed LinearSystem

    Raises:
        SystemSyntaxError: On grammar errors, non-zero constants, zero rows,
            variables that cancel everywhere, or an empty system
    """
    order: List[str] = []
    rows: List[Dict[str, Fraction]] = []
    last_line = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        last_line = line_no
        tokens = _tokenize(line, line_no)
        terms, constant = _LineParser(tokens, line_no, len(line)).equation()
        if constant != 0:
            raise SystemSyntaxError(
                "only homogeneous equations are supported (non-zero constant term)",
                line_no,
                tokens[0].column,
            )
        row: Dict[str, Fraction] = {}
        for name, coeff in terms:
            if name not in order:
                order.append(name)
            row[name] = row.get(name, Fraction(0)) + coeff
        if all(c == 0 for c in row.values()):
            raise SystemSyntaxError("equation reduces to 0 = 0", line_no, tokens[0].column)
        rows.append(row)

    if not rows:
        raise SystemSyntaxError("empty system", max(last_line, 1), 1)

    for name in order:
        if all(row.get(name, Fraction(0)) == 0 for row in rows):
            raise SystemSyntaxError(f"variable {name} cancels in every equation", last_line, 1)

    matrix = RatMatrix(tuple(tuple(row.get(name, Fraction(0)) for name in order) for row in rows))
    logger.debug(f"Parsed {len(rows)} equations over {len(order)} variables")
    return LinearSystem(matrix, tuple(order), family)


def load_system(source: Union[str, Path], family: SystemFamily = SystemFamily.CUSTOM) -> LinearSystem:
    """Read and parse an equation file ("-" reads stdin)."""
    if str(source) == "-":
        return parse_system(sys.stdin.read(), family)
    return parse_system(Path(source).read_text(encoding="utf-8"), family)
