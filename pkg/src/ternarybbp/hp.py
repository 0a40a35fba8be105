"""Binary fixed-point arbitrary-precision reals and complexes.

Values are exact dyadic rationals ``mantissa / 2**scale_bits``. Every rounding
step truncates toward zero, so each operation is off by less than one unit in
the last place of its result scale. Precision is passed per call; there is no
global context.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering
from typing import Literal

import gmpy2

Rational = Fraction

# Ternary/decimal digits withheld at the bottom of a value's precision.
RADIX_GUARD_DIGITS = 2


class PrecisionError(ValueError):
    """The value does not carry enough bits for the requested output."""


class ArithmeticDomainError(ValueError):
    """Division by zero or square root of a negative number."""


def trunc_shift(m: int, k: int) -> int:
    """Return m / 2**k truncated toward zero; a negative k shifts left."""
    if k <= 0:
        return m << -k
    if m >= 0:
        return m >> k
    return -((-m) >> k)


def trunc_div(a: int, b: int) -> int:
    """Integer quotient truncated toward zero."""
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


def fixed_from_fraction(q: Fraction, scale_bits: int) -> int:
    """Mantissa of q at the given scale, truncated toward zero."""
    return trunc_div(q.numerator << scale_bits, q.denominator)


@total_ordering
class BigReal:
    """Immutable fixed-point real ``mantissa / 2**scale_bits``."""

    __slots__ = ("mantissa", "scale_bits", "precision_bits")

    mantissa: int
    scale_bits: int
    precision_bits: int

    def __init__(self, mantissa: int, scale_bits: int, precision_bits: int | None = None) -> None:
        if scale_bits < 0:
            raise ValueError(f"scale_bits must be non-negative, got {scale_bits}")
        object.__setattr__(self, "mantissa", int(mantissa))
        object.__setattr__(self, "scale_bits", scale_bits)
        object.__setattr__(
            self, "precision_bits", scale_bits if precision_bits is None else precision_bits
        )

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("BigReal is immutable")

    def __reduce__(self) -> tuple[type[BigReal], tuple[int, int, int]]:
        return (BigReal, (self.mantissa, self.scale_bits, self.precision_bits))

    # -- construction ---------------------------------------------------

    @classmethod
    def from_int(cls, n: int, scale_bits: int = 0) -> BigReal:
        return cls(n << scale_bits, scale_bits)

    @classmethod
    def from_fraction(cls, q: Fraction | int, scale_bits: int) -> BigReal:
        return cls(fixed_from_fraction(Fraction(q), scale_bits), scale_bits)

    @classmethod
    def zero(cls, scale_bits: int = 0) -> BigReal:
        return cls(0, scale_bits)

    def at_scale(self, scale_bits: int) -> BigReal:
        """The same value re-expressed (truncated or extended) at another scale."""
        return BigReal(
            trunc_shift(self.mantissa, self.scale_bits - scale_bits),
            scale_bits,
            self.precision_bits,
        )

    # -- inspection -----------------------------------------------------

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.scale_bits)

    def ulp(self) -> Fraction:
        return Fraction(1, 1 << self.scale_bits)

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    def __float__(self) -> float:
        return float(self.to_fraction())

    def __repr__(self) -> str:
        return f"BigReal({float(self)!r}, scale_bits={self.scale_bits})"

    # -- arithmetic -----------------------------------------------------

    def _aligned(self, other: BigReal) -> tuple[int, int, int]:
        s = max(self.scale_bits, other.scale_bits)
        return (
            self.mantissa << (s - self.scale_bits),
            other.mantissa << (s - other.scale_bits),
            s,
        )

    def __add__(self, other: BigReal | int) -> BigReal:
        if isinstance(other, int):
            other = BigReal.from_int(other)
        a, b, s = self._aligned(other)
        return BigReal(a + b, s, max(self.precision_bits, other.precision_bits))

    __radd__ = __add__

    def __sub__(self, other: BigReal | int) -> BigReal:
        if isinstance(other, int):
            other = BigReal.from_int(other)
        a, b, s = self._aligned(other)
        return BigReal(a - b, s, max(self.precision_bits, other.precision_bits))

    def __rsub__(self, other: int) -> BigReal:
        return BigReal.from_int(other) - self

    def __neg__(self) -> BigReal:
        return BigReal(-self.mantissa, self.scale_bits, self.precision_bits)

    def __abs__(self) -> BigReal:
        return BigReal(abs(self.mantissa), self.scale_bits, self.precision_bits)

    def __mul__(self, other: BigReal | int | Fraction) -> BigReal:
        if isinstance(other, int):
            return BigReal(self.mantissa * other, self.scale_bits, self.precision_bits)
        if isinstance(other, Fraction):
            return BigReal(
                trunc_div(self.mantissa * other.numerator, other.denominator),
                self.scale_bits,
                self.precision_bits,
            )
        s = max(self.scale_bits, other.scale_bits)
        product = self.mantissa * other.mantissa
        return BigReal(
            trunc_shift(product, self.scale_bits + other.scale_bits - s),
            s,
            max(self.precision_bits, other.precision_bits),
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> BigReal:
        if exponent < 0:
            raise ValueError("BigReal powers must be non-negative; use div")
        result = BigReal.from_int(1, self.scale_bits)
        for _ in range(exponent):
            result = result * self
        return result

    # -- comparison -----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = BigReal.from_int(other)
        if not isinstance(other, BigReal):
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a == b

    def __lt__(self, other: BigReal | int) -> bool:
        if isinstance(other, int):
            other = BigReal.from_int(other)
        a, b, _ = self._aligned(other)
        return a < b

    def __hash__(self) -> int:
        return hash(self.to_fraction())


class BigComplex:
    """Immutable pair of BigReals; products truncate componentwise."""

    __slots__ = ("re", "im")

    re: BigReal
    im: BigReal

    def __init__(self, re: BigReal, im: BigReal) -> None:
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("BigComplex is immutable")

    def __reduce__(self) -> tuple[type[BigComplex], tuple[BigReal, BigReal]]:
        return (BigComplex, (self.re, self.im))

    @classmethod
    def zero(cls, scale_bits: int = 0) -> BigComplex:
        return cls(BigReal.zero(scale_bits), BigReal.zero(scale_bits))

    def __add__(self, other: BigComplex) -> BigComplex:
        return BigComplex(self.re + other.re, self.im + other.im)

    def __sub__(self, other: BigComplex) -> BigComplex:
        return BigComplex(self.re - other.re, self.im - other.im)

    def __neg__(self) -> BigComplex:
        return BigComplex(-self.re, -self.im)

    def __mul__(self, other: BigComplex | BigReal | int | Fraction) -> BigComplex:
        if isinstance(other, BigComplex):
            return BigComplex(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return BigComplex(self.re * other, self.im * other)

    def conjugate(self) -> BigComplex:
        return BigComplex(self.re, -self.im)

    def abs_squared(self) -> BigReal:
        return self.re * self.re + self.im * self.im

    def __repr__(self) -> str:
        return f"BigComplex({float(self.re)!r}, {float(self.im)!r})"


# -- module-level operations ---------------------------------------------------


def add(a: BigReal, b: BigReal) -> BigReal:
    return a + b


def sub(a: BigReal, b: BigReal) -> BigReal:
    return a - b


def mul(a: BigReal, b: BigReal) -> BigReal:
    return a * b


def div(a: BigReal, b: BigReal, prec_bits: int) -> BigReal:
    """a / b at scale prec_bits, truncated toward zero."""
    if b.mantissa == 0:
        raise ArithmeticDomainError("division by zero")
    shift = prec_bits + b.scale_bits - a.scale_bits
    if shift >= 0:
        m = trunc_div(a.mantissa << shift, b.mantissa)
    else:
        m = trunc_div(a.mantissa, b.mantissa << -shift)
    return BigReal(m, prec_bits, prec_bits)


def sqrt(a: BigReal, prec_bits: int) -> BigReal:
    """Square root with relative error below 2**-prec_bits.

    Values below one get extra fractional bits so the bound stays relative.
    """
    if a.mantissa < 0:
        raise ArithmeticDomainError(f"square root of negative value {float(a)!r}")
    if a.mantissa == 0:
        return BigReal(0, prec_bits, prec_bits)
    leading_zeros = max(0, a.scale_bits - a.mantissa.bit_length())
    scale = prec_bits + leading_zeros // 2 + 1
    shift = 2 * scale - a.scale_bits
    radicand = a.mantissa << shift if shift >= 0 else a.mantissa >> -shift
    return BigReal(math.isqrt(radicand), scale, prec_bits)


def max_radix_digits(scale_bits: int, radix: int) -> int:
    """Largest digit count to_radix_string accepts for a value at this scale."""
    return max(0, math.floor(scale_bits * math.log(2) / math.log(radix)) - RADIX_GUARD_DIGITS)


def _render(n: int, radix: int) -> str:
    return str(n) if radix == 10 else gmpy2.mpz(n).digits(radix)


def to_radix_string(a: BigReal, radix: int, digits: int) -> str:
    """Sign, integer part and exactly ``digits`` truncated fractional digits."""
    if radix not in (3, 10):
        raise ValueError(f"radix must be 3 or 10, got {radix}")
    if digits < 0:
        raise ValueError(f"digit count must be non-negative, got {digits}")
    if radix ** (digits + RADIX_GUARD_DIGITS) > 1 << a.scale_bits:
        needed = math.ceil((digits + RADIX_GUARD_DIGITS) * math.log2(radix))
        raise PrecisionError(
            f"{digits} radix-{radix} digits need at least {needed} bits, "
            f"value carries {a.scale_bits} (short by {needed - a.scale_bits})"
        )
    m = abs(a.mantissa)
    sign = "-" if a.mantissa < 0 else ""
    int_part = m >> a.scale_bits
    frac = m - (int_part << a.scale_bits)
    head = f"{sign}{_render(int_part, radix)}"
    if digits == 0:
        return head
    scaled = (frac * radix**digits) >> a.scale_bits
    return f"{head}.{_render(scaled, radix).zfill(digits)}"


# -- exact trigonometry at multiples of pi/6 --------------------------------

# cos(t*pi/6) for t = 0..11 as (rational part, carries a sqrt(3) factor)
_COS_PI6: tuple[tuple[Fraction, bool], ...] = (
    (Fraction(1), False),
    (Fraction(1, 2), True),
    (Fraction(1, 2), False),
    (Fraction(0), False),
    (Fraction(-1, 2), False),
    (Fraction(-1, 2), True),
    (Fraction(-1), False),
    (Fraction(-1, 2), True),
    (Fraction(-1, 2), False),
    (Fraction(0), False),
    (Fraction(1, 2), False),
    (Fraction(1, 2), True),
)


def trig_pi6(t: int, kind: Literal["cos", "sin"]) -> tuple[Fraction, bool]:
    """cos or sin of t*pi/6 as ``(r, has_sqrt3)`` meaning r or r*sqrt(3)."""
    if kind == "sin":
        t -= 3
    return _COS_PI6[t % 12]
