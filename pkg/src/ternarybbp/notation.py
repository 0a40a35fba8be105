"""P-notation grammar, canonical printer and exact formula algebra.

Formula text::

    formula := [scale] "P" "(" "(" int "," int "," int "," "(" intlist ")" ")" ")"
    scale   := product ["/" (product | "(" product ")")]
    product := factor {"*" factor}
    factor  := ["-"] uint ["^" uint]

Constant expressions are signed sums of ``rational * name^power * ...`` over
the names in ``models.CONSTANT_NAMES``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import reduce
from typing import Iterable, Literal, NamedTuple, Sequence

from pydantic import ValidationError

from .models import CONSTANT_NAMES, BbpFormula, ConstantExpr, Term, format_fraction

ParseErrorKind = Literal["token", "length", "base", "degree", "scale"]


class ParseError(ValueError):
    """Malformed P-notation or constant-expression text."""

    def __init__(self, message: str, position: int, kind: ParseErrorKind = "token") -> None:
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position
        self.kind = kind


class ShapeError(ValueError):
    """Formulas with different (degree, base, length) were mixed."""


class Token(NamedTuple):
    kind: str
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[()\[\],*/^+\-]))"
)

# Typeset forms accepted on input.
_NORMALIZE = str.maketrans({"−": "-", "·": "*", "×": "*"})

# Largest integer a `^` literal may produce, and the largest constant power.
MAX_LITERAL_BITS = 1 << 16
MAX_CONSTANT_POWER = 64


def _tokenize(text: str) -> list[Token]:
    text = text.translate(_NORMALIZE)
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup or "op"
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Cursor:
    """Recursive-descent helper over a token list."""

    def __init__(self, text: str) -> None:
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, text: str) -> bool:
        return self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", self.tok.pos)
        return self.advance()

    def uint(self) -> int:
        if self.tok.kind != "num":
            found = self.tok.text or "end of input"
            raise ParseError(f"expected an unsigned integer, found {found!r}", self.tok.pos)
        return int(self.advance().text)

    def factor(self) -> int:
        negative = False
        if self.peek("-"):
            self.advance()
            negative = True
        value = self.uint()
        if self.peek("^"):
            self.advance()
            exp_pos = self.tok.pos
            exponent = self.uint()
            if exponent * max(value.bit_length() - 1, 0) > MAX_LITERAL_BITS:
                raise ParseError(
                    f"{value}^{exponent} exceeds {MAX_LITERAL_BITS} bits", exp_pos
                )
            value = value**exponent
        return -value if negative else value

    def product(self) -> int:
        value = self.factor()
        while self.peek("*"):
            self.advance()
            value *= self.factor()
        return value

    def at_end(self) -> None:
        if self.tok.kind != "end":
            raise ParseError(f"unexpected trailing {self.tok.text!r}", self.tok.pos)


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------


def parse(text: str) -> BbpFormula:
    """Parse P-notation text into an exact BbpFormula."""
    cur = _Cursor(text)
    scale = Fraction(1)
    if not cur.peek("P"):
        scale_pos = cur.tok.pos
        num = cur.product()
        den = 1
        if cur.peek("/"):
            cur.advance()
            if cur.peek("("):
                cur.advance()
                den = cur.product()
                cur.expect(")")
            else:
                den = cur.product()
        if den == 0:
            raise ParseError("scale has a zero denominator", scale_pos, "scale")
        scale = Fraction(num, den)
    cur.expect("P")
    cur.expect("(")
    cur.expect("(")
    s_pos = cur.tok.pos
    s = cur.product()
    cur.expect(",")
    b_pos = cur.tok.pos
    b = cur.product()
    cur.expect(",")
    n_pos = cur.tok.pos
    n = cur.product()
    cur.expect(",")
    list_pos = cur.expect("(").pos
    coeffs = [cur.product()]
    while cur.peek(","):
        cur.advance()
        coeffs.append(cur.product())
    cur.expect(")")
    cur.expect(")")
    cur.expect(")")
    cur.at_end()

    if s < 1:
        raise ParseError(f"degree must be at least 1, got {s}", s_pos, "degree")
    if abs(b) < 2:
        raise ParseError(f"|base| must be at least 2, got {b}", b_pos, "base")
    if n < 1:
        raise ParseError(f"length must be positive, got {n}", n_pos, "length")
    if len(coeffs) != n:
        raise ParseError(
            f"expected {n} coefficients, found {len(coeffs)}", list_pos, "length"
        )
    return BbpFormula(scale=scale, degree_s=s, base_b=b, length_n=n, coeffs=tuple(coeffs))


def print_formula(f: BbpFormula) -> str:
    """Canonical text: plain integer coefficients, reduced scale, scale 1 omitted."""
    body = f"P(({f.degree_s},{f.base_b},{f.length_n},({','.join(map(str, f.coeffs))})))"
    if f.scale == 1:
        return body
    return f"{format_fraction(f.scale)} {body}"


def _content(values: Iterable[int]) -> int:
    return reduce(math.gcd, values, 0)


def formula_from_terms(shape: tuple[int, int, int], vector: Sequence[Fraction]) -> BbpFormula:
    """Integer coefficients with the common denominator and content in the scale."""
    s, b, n = shape
    den = reduce(math.lcm, (v.denominator for v in vector), 1)
    ints = [int(v * den) for v in vector]
    g = _content(ints)
    if g == 0:
        return BbpFormula(scale=Fraction(1), degree_s=s, base_b=b, length_n=n, coeffs=tuple(ints))
    return BbpFormula(
        scale=Fraction(g, den),
        degree_s=s,
        base_b=b,
        length_n=n,
        coeffs=tuple(v // g for v in ints),
    )


def term_vector(f: BbpFormula) -> tuple[Fraction, ...]:
    """Exact scale * a_j for each position."""
    return tuple(f.scale * a for a in f.coeffs)


def combine(inputs: Sequence[tuple[Fraction | int, BbpFormula]]) -> BbpFormula:
    """Exact linear combination of same-shape formulas."""
    if not inputs:
        raise ShapeError("combine needs at least one formula")
    shape = inputs[0][1].shape
    for _, f in inputs[1:]:
        if f.shape != shape:
            raise ShapeError(
                f"cannot combine shape (s,b,n)={f.shape} with {shape}; rescale first"
            )
    vector = [Fraction(0)] * shape[2]
    for weight, f in inputs:
        for j, t in enumerate(term_vector(f)):
            vector[j] += Fraction(weight) * t
    return formula_from_terms(shape, vector)


def terms_equal(f: BbpFormula, g: BbpFormula) -> bool:
    """True when both formulas have the same shape and identical scale * a_j."""
    return f.shape == g.shape and term_vector(f) == term_vector(g)


def rescale(f: BbpFormula, block: int, spread: int = 1) -> BbpFormula:
    """Equivalent formula in base b**block, length n*block (times ``spread``).

    Blocking moves a_j to positions j + n*r with weight b**(block-1-r). Spreading
    rewrites (kn+j) as (krn + rj)/r, so coefficients move to r*j and gain r**s.
    Common powers of |b| and the spread factor are pulled into the scale and
    the scale is made positive.
    """
    if block < 1 or spread < 1:
        raise ValueError(f"block and spread must be positive, got {block}, {spread}")
    if block == 1 and spread == 1:
        return f
    b, n, s = f.base_b, f.length_n, f.degree_s
    coeffs = [0] * (n * block)
    for r in range(block):
        weight = b ** (block - 1 - r)
        for j, a in enumerate(f.coeffs):
            coeffs[j + n * r] = a * weight
    scale = f.scale / Fraction(b) ** (block - 1)

    mag = abs(b)
    while any(coeffs) and all(c % mag == 0 for c in coeffs):
        coeffs = [c // mag for c in coeffs]
        scale *= mag

    if spread > 1:
        lifted = [0] * (len(coeffs) * spread)
        for j, a in enumerate(coeffs, start=1):
            lifted[spread * j - 1] = a * spread**s
        g = math.gcd(spread**s, _content(lifted))
        coeffs = [c // g for c in lifted] if g else lifted
        scale *= g

    if scale < 0:
        scale = -scale
        coeffs = [-c for c in coeffs]
    return BbpFormula(
        scale=scale,
        degree_s=s,
        base_b=b**block,
        length_n=len(coeffs),
        coeffs=tuple(coeffs),
    )


# ---------------------------------------------------------------------------
# Constant expressions
# ---------------------------------------------------------------------------


def parse_constant_expr(text: str) -> ConstantExpr:
    """Parse ``13*zeta3 - 1*pi^2*ln3 + 1*ln3^3`` style text; ``0`` is empty."""
    cur = _Cursor(text)
    terms: list[Term] = []
    sign = 1
    if cur.peek("+") or cur.peek("-"):
        sign = -1 if cur.advance().text == "-" else 1
    while True:
        coefficient = Fraction(sign)
        powers: list[tuple[str, int]] = []
        while True:
            tok = cur.tok
            if tok.kind == "num":
                num = int(cur.advance().text)
                den = 1
                if cur.peek("/"):
                    cur.advance()
                    den_pos = cur.tok.pos
                    den = cur.uint()
                    if den == 0:
                        raise ParseError("zero denominator", den_pos, "scale")
                coefficient *= Fraction(num, den)
            elif tok.kind == "name":
                if tok.text not in CONSTANT_NAMES:
                    raise ParseError(
                        f"unknown constant {tok.text!r}; allowed: {', '.join(CONSTANT_NAMES)}",
                        tok.pos,
                    )
                cur.advance()
                power = 1
                if cur.peek("^"):
                    cur.advance()
                    power_pos = cur.tok.pos
                    power = cur.uint()
                    if not 1 <= power <= MAX_CONSTANT_POWER:
                        raise ParseError(
                            f"power of {tok.text} must be in 1..{MAX_CONSTANT_POWER}", power_pos
                        )
                powers.append((tok.text, power))
            else:
                found = tok.text or "end of input"
                raise ParseError(f"expected a number or constant, found {found!r}", tok.pos)
            if not cur.peek("*"):
                break
            cur.advance()
        terms.append(Term(coefficient=coefficient, monomial=tuple(powers)))
        if cur.peek("+") or cur.peek("-"):
            sign = -1 if cur.advance().text == "-" else 1
            continue
        break
    cur.at_end()
    try:
        return ConstantExpr(terms=tuple(terms))
    except ValidationError as exc:
        raise ParseError(str(exc), 0) from exc


def format_constant_expr(expr: ConstantExpr) -> str:
    """Canonical text that parse_constant_expr reads back to the same value."""
    if expr.is_zero():
        return "0"
    parts: list[str] = []
    for i, term in enumerate(expr.terms):
        c = term.coefficient
        body = format_fraction(abs(c))
        for name, power in term.monomial:
            body += f"*{name}" if power == 1 else f"*{name}^{power}"
        if i == 0:
            parts.append(f"-{body}" if c < 0 else body)
        else:
            parts.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(parts)
