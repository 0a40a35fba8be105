"""Pydantic data models for ternary BBP formulas, catalog entries and results."""

from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Literal

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    field_validator,
    model_validator,
)

from .hp import BigReal

CONSTANT_NAMES: tuple[str, ...] = (
    "pi",
    "ln2",
    "ln3",
    "zeta3",
    "zeta5",
    "cl2_pi3",
    "cl4_pi3",
    "sqrt3",
)


def _coerce_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.replace(" ", ""))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def format_fraction(q: Fraction) -> str:
    """``num/den`` in lowest terms, or a bare integer."""
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


RationalField = Annotated[
    Fraction,
    BeforeValidator(_coerce_fraction),
    PlainSerializer(format_fraction, return_type=str),
]

BigRealField = Annotated[
    BigReal,
    PlainSerializer(lambda v: float(v), return_type=float),
]


def ternary_exponent(base: int) -> int | None:
    """m when |base| = 3**m with m >= 1, else None."""
    n = abs(base)
    m = 0
    while n > 1 and n % 3 == 0:
        n //= 3
        m += 1
    return m if n == 1 and m >= 1 else None


# ---------------------------------------------------------------------------
# Formulas and constant expressions
# ---------------------------------------------------------------------------


class BbpFormula(BaseModel):
    """scale * sum_k base^-k sum_j coeffs[j-1] / (k*length + j)^degree."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scale: RationalField
    degree_s: int
    base_b: int
    length_n: int
    coeffs: tuple[int, ...]

    @field_validator("degree_s")
    @classmethod
    def degree_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"degree must be at least 1, got {v}")
        return v

    @field_validator("base_b")
    @classmethod
    def base_magnitude(cls, v: int) -> int:
        if abs(v) < 2:
            raise ValueError(f"|base| must be at least 2, got {v}")
        return v

    @field_validator("length_n")
    @classmethod
    def length_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"length must be at least 1, got {v}")
        return v

    @model_validator(mode="after")
    def coeff_count(self) -> BbpFormula:
        if len(self.coeffs) != self.length_n:
            raise ValueError(
                f"expected {self.length_n} coefficients, found {len(self.coeffs)}"
            )
        return self

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.degree_s, self.base_b, self.length_n)

    def is_zero(self) -> bool:
        return self.scale == 0 or not any(self.coeffs)


Monomial = tuple[tuple[str, int], ...]


class Term(BaseModel):
    """coefficient * prod(name**power)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coefficient: RationalField
    monomial: Monomial = ()

    @field_validator("monomial")
    @classmethod
    def canonical_monomial(cls, v: Monomial) -> Monomial:
        powers: dict[str, int] = {}
        for name, power in v:
            if name not in CONSTANT_NAMES:
                raise ValueError(
                    f"unknown constant {name!r}; allowed: {', '.join(CONSTANT_NAMES)}"
                )
            if power < 1:
                raise ValueError(f"power of {name} must be positive, got {power}")
            powers[name] = powers.get(name, 0) + power
        return tuple(sorted(powers.items()))

    @property
    def degree(self) -> int:
        return sum(p for _, p in self.monomial)


def _reduce_sqrt3(term: Term) -> Term:
    powers = dict(term.monomial)
    k = powers.pop("sqrt3", 0)
    if k < 2:
        return term
    if k % 2:
        powers["sqrt3"] = 1
    return Term(
        coefficient=term.coefficient * 3 ** (k // 2),
        monomial=tuple(powers.items()),
    )


class ConstantExpr(BaseModel):
    """Exact linear combination of monomials in the named constants.

    Terms are merged by monomial, zero terms dropped and the rest sorted, so
    equal expressions compare equal. ``sqrt3**2`` folds into the coefficient.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    terms: tuple[Term, ...] = ()

    @field_validator("terms")
    @classmethod
    def merge_terms(cls, v: tuple[Term, ...]) -> tuple[Term, ...]:
        merged: dict[Monomial, Fraction] = {}
        for term in v:
            term = _reduce_sqrt3(term)
            merged[term.monomial] = merged.get(term.monomial, Fraction(0)) + term.coefficient
        return tuple(
            Term(coefficient=c, monomial=mono)
            for mono, c in sorted(merged.items(), key=lambda kv: (-sum(p for _, p in kv[0]), kv[0]))
            if c != 0
        )

    @classmethod
    def constant(cls, name: str, coefficient: Fraction | int = 1, power: int = 1) -> ConstantExpr:
        return cls(terms=(Term(coefficient=Fraction(coefficient), monomial=((name, power),)),))

    @classmethod
    def rational(cls, q: Fraction | int) -> ConstantExpr:
        return cls(terms=(Term(coefficient=Fraction(q)),))

    def is_zero(self) -> bool:
        return not self.terms

    def names(self) -> set[str]:
        return {name for t in self.terms for name, _ in t.monomial}

    def __add__(self, other: ConstantExpr) -> ConstantExpr:
        return ConstantExpr(terms=self.terms + other.terms)

    def __neg__(self) -> ConstantExpr:
        return self.scaled(Fraction(-1))

    def __sub__(self, other: ConstantExpr) -> ConstantExpr:
        return self + (-other)

    def scaled(self, q: Fraction | int) -> ConstantExpr:
        return ConstantExpr(
            terms=tuple(Term(coefficient=t.coefficient * q, monomial=t.monomial) for t in self.terms)
        )

    def __mul__(self, other: ConstantExpr) -> ConstantExpr:
        return ConstantExpr(
            terms=tuple(
                Term(coefficient=a.coefficient * b.coefficient, monomial=a.monomial + b.monomial)
                for a in self.terms
                for b in other.terms
            )
        )


# ---------------------------------------------------------------------------
# Polylogarithm points and catalog records
# ---------------------------------------------------------------------------


class Part(str, Enum):
    """Real or imaginary part of a polylogarithm value."""

    RE = "Re"
    IM = "Im"


class Radical(str, Enum):
    """Factor separating a polylog part from its rational BBP table."""

    ONE = "1"
    SQRT3 = "sqrt3"


class PolylogPoint(BaseModel):
    """Li_s at modulus 1/sqrt(modulus_q), angle pi * angle_m / angle_d."""

    model_config = ConfigDict(frozen=True)

    degree_s: int = Field(ge=1)
    modulus_q: int
    angle_m: int
    angle_d: int = Field(ge=1)

    @field_validator("modulus_q")
    @classmethod
    def modulus_at_most_one(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"modulus 1/sqrt({v}) is undefined")
        return v

    @model_validator(mode="before")
    @classmethod
    def reduce_angle(cls, data: Any) -> Any:
        if isinstance(data, dict) and "angle_m" in data and "angle_d" in data:
            m, d = int(data["angle_m"]), int(data["angle_d"])
            if d > 0:
                g = math.gcd(m, d) or 1
                data = {**data, "angle_m": m // g, "angle_d": d // g}
        return data


class SeriesTerm(BaseModel):
    """weight * part(Li_s(point)), the left side of an expansion record."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    weight: RationalField = Fraction(1)
    part: Part
    point: PolylogPoint


class EntryKind(str, Enum):
    """What a catalog record asserts about its formula."""

    FORMULA = "formula"
    ZERO_RELATION = "zero_relation"
    EXPANSION = "expansion"


class CatalogEntry(BaseModel):
    """A named BBP formula with the closed form or series it equals."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    lhs: ConstantExpr | None = None
    rhs: BbpFormula
    citation: str = ""
    kind: EntryKind
    series: SeriesTerm | None = None
    radical: Radical = Radical.ONE
    printed: BbpFormula | None = None
    note: str | None = None

    @field_validator("name")
    @classmethod
    def name_token(cls, v: str) -> str:
        if not v or any(c.isspace() for c in v):
            raise ValueError(f"entry name must be a non-empty token, got {v!r}")
        return v

    @model_validator(mode="after")
    def kind_matches_content(self) -> CatalogEntry:
        if self.kind is EntryKind.EXPANSION:
            if self.series is None:
                raise ValueError(f"{self.name}: expansion entries need a series")
            return self
        if self.series is not None:
            raise ValueError(f"{self.name}: only expansion entries carry a series")
        if self.lhs is None:
            raise ValueError(f"{self.name}: {self.kind.value} entries need an lhs")
        if (self.kind is EntryKind.ZERO_RELATION) != self.lhs.is_zero():
            raise ValueError(
                f"{self.name}: kind {self.kind.value} disagrees with lhs "
                f"({'zero' if self.lhs.is_zero() else 'nonzero'})"
            )
        return self


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------


class EvalReport(BaseModel):
    """A truncated BBP sum with its rigorous truncation bound."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: BigRealField
    terms_used: int
    tail_bound: BigRealField


class ExtractionRequest(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    formula: BbpFormula
    position: int = Field(ge=0)
    count: int = Field(ge=1, le=64)
    guard: int = Field(default=24, ge=1)

    @field_validator("formula")
    @classmethod
    def ternary_base(cls, v: BbpFormula) -> BbpFormula:
        if ternary_exponent(v.base_b) is None:
            raise ValueError(f"base {v.base_b} is not +-3^m; ternary digits cannot be extracted")
        return v


class ExtractionResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    digits: str = Field(pattern=r"^[012]+$")
    position: int
    confidence_margin: int
    terms_used: int = 0

    @field_validator("confidence_margin")
    @classmethod
    def margin_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"confidence margin {v} is below 1; digits withheld")
        return v


class VerificationOutcome(BaseModel):
    """|lhs - rhs| against a decimal threshold for one named check."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entry_name: str
    lhs_value: BigRealField
    rhs_value: BigRealField
    abs_diff: BigRealField
    threshold: BigRealField
    passed: bool
    citation: str = ""
    digits: int

    @model_validator(mode="after")
    def passed_matches_diff(self) -> VerificationOutcome:
        if self.passed != (self.abs_diff < self.threshold):
            raise ValueError(f"{self.entry_name}: passed flag contradicts abs_diff < threshold")
        return self


TableStatus = Literal["match", "printed differs", "mismatch"]


class TableCheck(BaseModel):
    """A regenerated multisection table compared with the stored one."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entry_name: str
    citation: str = ""
    status: TableStatus
    generated: BbpFormula
    stored: BbpFormula
    detail: str = ""


class CliConfig(BaseModel):
    """Defaults for the command-line surface."""

    eval_digits: int = Field(default=50, ge=1)
    count: int = Field(default=16, ge=1, le=64)
    guard: int = Field(default=24, ge=1)
    verify_digits: int = Field(default=200, ge=20)
    identity_digits: int = Field(default=100, ge=20)
    workers: int = Field(default=1, ge=1)
    max_workers: int | None = Field(default=None, ge=1)
    catalog_path: Path | None = None
    output_mode: Literal["text", "json"] = "text"

    @model_validator(mode="after")
    def clamp_workers(self) -> CliConfig:
        if self.max_workers is not None and self.workers > self.max_workers:
            self.workers = self.max_workers
        return self
