"""Independent high-precision values for every named constant.

Nothing here evaluates a catalog formula: pi comes from Machin-type arctangent
series, the logarithms from atanh series, zeta values and Clausen/Glaisher
functions from Euler-Maclaurin Hurwitz zeta sums. Each computation works in
integer fixed point with its own guard bits and returns a ``BigReal`` whose
``precision_bits`` is the requested precision.
"""

from __future__ import annotations

import logging
import math
import threading
from fractions import Fraction
from typing import Callable, Literal, NamedTuple

from . import hp
from .hp import BigReal, fixed_from_fraction, trig_pi6, trunc_div
from .models import CONSTANT_NAMES, ConstantExpr

logger = logging.getLogger(__name__)

# Fixed-point bits carried beyond the caller's precision.
ORACLE_GUARD_BITS = 32

# Two-method results must agree to prec_bits minus this.
AGREEMENT_SLACK_BITS = 8


class OracleError(ValueError):
    """An oracle computation failed its internal consistency check."""


def _working_bits(prec_bits: int) -> int:
    if prec_bits < 1:
        raise ValueError(f"precision must be positive, got {prec_bits}")
    return prec_bits + ORACLE_GUARD_BITS + prec_bits.bit_length()


def _agree(a: int, b: int, work_bits: int, prec_bits: int, what: str) -> None:
    tolerance = 1 << max(0, work_bits - prec_bits + AGREEMENT_SLACK_BITS)
    if abs(a - b) >= tolerance:
        raise OracleError(
            f"{what}: independent methods disagree at {prec_bits - AGREEMENT_SLACK_BITS} bits"
        )


# ---------------------------------------------------------------------------
# pi and logarithms
# ---------------------------------------------------------------------------


def _arctan_inv(x: int, work_bits: int) -> int:
    """arctan(1/x) in fixed point; every term truncated."""
    x2 = x * x
    power = (1 << work_bits) // x
    total = 0
    k = 0
    while power:
        term = power // (2 * k + 1)
        total += -term if k % 2 else term
        power //= x2
        k += 1
    return total


def _atanh_ratio(a: int, b: int, work_bits: int) -> int:
    """atanh(a/b) for 0 < a < b in fixed point."""
    if not 0 < a < b:
        raise ValueError(f"atanh argument {a}/{b} must lie in (0, 1)")
    a2, b2 = a * a, b * b
    power = (a << work_bits) // b
    total = 0
    k = 0
    while power:
        total += power // (2 * k + 1)
        power = power * a2 // b2
        k += 1
    return total


def pi(prec_bits: int) -> BigReal:
    """pi = 16 arctan(1/5) - 4 arctan(1/239), checked against 4 arctan(1/2) + 4 arctan(1/3)."""
    w = _working_bits(prec_bits)
    machin = 16 * _arctan_inv(5, w) - 4 * _arctan_inv(239, w)
    euler = 4 * _arctan_inv(2, w) + 4 * _arctan_inv(3, w)
    _agree(machin, euler, w, prec_bits, "pi")
    return BigReal(machin, w, prec_bits)


def log_atanh(p: int, q: int, prec_bits: int) -> BigReal:
    """ln(q/p) = 2 atanh((q-p)/(q+p)) for integers 0 < p < q."""
    if not 0 < p < q:
        raise ValueError(f"log_atanh needs 0 < p < q, got p={p}, q={q}")
    w = _working_bits(prec_bits)
    return BigReal(2 * _atanh_ratio(q - p, q + p, w), w, prec_bits)


def ln2(prec_bits: int) -> BigReal:
    return log_atanh(1, 2, prec_bits)


def ln3(prec_bits: int) -> BigReal:
    """ln 3 = ln 2 + 2 atanh(1/5), since 3/2 = (1 + 1/5)/(1 - 1/5)."""
    w = _working_bits(prec_bits)
    total = 2 * _atanh_ratio(1, 3, w) + 2 * _atanh_ratio(1, 5, w)
    return BigReal(total, w, prec_bits)


def sqrt3(prec_bits: int) -> BigReal:
    return hp.sqrt(BigReal.from_int(3), prec_bits + ORACLE_GUARD_BITS)


# ---------------------------------------------------------------------------
# Bernoulli numbers and polynomials
# ---------------------------------------------------------------------------


class BernoulliCache:
    """Exact Bernoulli numbers (B_1 = -1/2) grown on demand, thread safe."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.numbers: list[Fraction] = [Fraction(1)]
        self._polynomials: dict[int, tuple[Fraction, ...]] = {}

    def number(self, n: int) -> Fraction:
        if n < 0:
            raise ValueError(f"Bernoulli index must be non-negative, got {n}")
        with self._lock:
            while len(self.numbers) <= n:
                m = len(self.numbers)
                if m > 1 and m % 2:
                    self.numbers.append(Fraction(0))
                    continue
                acc = sum(math.comb(m + 1, j) * self.numbers[j] for j in range(m))
                self.numbers.append(-acc / (m + 1))
            return self.numbers[n]

    def polynomial(self, n: int) -> tuple[Fraction, ...]:
        """Coefficients c_0..c_n of B_n(x) = sum C(n,k) B_{n-k} x^k."""
        self.number(n)
        with self._lock:
            if n not in self._polynomials:
                self._polynomials[n] = tuple(
                    math.comb(n, k) * self.numbers[n - k] for k in range(n + 1)
                )
            return self._polynomials[n]


_BERNOULLI = BernoulliCache()


def bernoulli(n: int) -> Fraction:
    return _BERNOULLI.number(n)


def bernoulli_poly(n: int) -> tuple[Fraction, ...]:
    return _BERNOULLI.polynomial(n)


def eval_poly(coeffs: tuple[Fraction, ...], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# Hurwitz and Riemann zeta
# ---------------------------------------------------------------------------


def _em_corrections(s: int, x: Fraction, eps: Fraction) -> list[Fraction] | None:
    """Euler-Maclaurin correction terms at x = N + a, or None if they diverge first."""
    terms: list[Fraction] = []
    rising = Fraction(s)
    x_power = x ** (-s - 1)
    x_inv2 = 1 / (x * x)
    previous: Fraction | None = None
    j = 1
    while True:
        term = bernoulli(2 * j) / math.factorial(2 * j) * rising * x_power
        if abs(term) < eps:
            return terms
        if previous is not None and abs(term) > abs(previous):
            return None
        terms.append(term)
        previous = term
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        x_power *= x_inv2
        j += 1


def hurwitz_zeta(s: int, a: Fraction | int, prec_bits: int) -> BigReal:
    """zeta(s, a) = sum_{k>=0} (k+a)^-s for integer s >= 2 and rational a > 0.

    Euler-Maclaurin with N = max(2s, prec/4) leading terms, N doubled until the
    first omitted correction drops below 2**-(prec+8). All terms are exact
    rationals truncated to fixed point.
    """
    if s < 2:
        raise ValueError(f"hurwitz_zeta needs s >= 2, got {s}")
    a = Fraction(a)
    if a <= 0:
        raise ValueError(f"hurwitz_zeta needs a > 0, got {a}")
    eps = Fraction(1, 1 << (prec_bits + AGREEMENT_SLACK_BITS))
    N = max(2 * s, prec_bits // 4)
    while (corrections := _em_corrections(s, N + a, eps)) is None:
        N *= 2

    w = _working_bits(prec_bits) + (N + len(corrections)).bit_length()
    u, v = a.numerator, a.denominator
    vs = v**s << w
    total = sum(vs // (k * v + u) ** s for k in range(N))
    x = N + a
    tail = x ** (1 - s) / (s - 1) + x ** (-s) / 2 + sum(corrections, Fraction(0))
    total += fixed_from_fraction(tail, w)
    logger.debug(
        "hurwitz_zeta s=%d a=%s: N=%d, %d corrections", s, a, N, len(corrections)
    )
    return BigReal(total, w, prec_bits)


def _eta(s: int, prec_bits: int) -> BigReal:
    """Dirichlet eta by the binomial (Euler) transform, summed to 2**-w."""
    w = _working_bits(prec_bits)
    N = w + 4
    # weights[k] * 2**-N = sum_{n=k}^{N-1} C(n, k) / 2**(n+1)
    weights = [0] * N
    row = [1]
    for n in range(N):
        shift = N - n - 1
        for k, c in enumerate(row):
            weights[k] += c << shift
        row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]
    one = 1 << w
    total = 0
    for k, weight in enumerate(weights):
        term = weight * (one // (k + 1) ** s)
        total += -term if k % 2 else term
    return BigReal(total >> N if total >= 0 else -((-total) >> N), w, prec_bits)


def zeta(s: int, prec_bits: int) -> BigReal:
    """zeta(s) by Hurwitz at a = 1, cross-checked against eta(s) / (1 - 2**(1-s))."""
    if s < 2:
        raise ValueError(f"zeta needs s >= 2, got {s}")
    primary = hurwitz_zeta(s, 1, prec_bits)
    eta = _eta(s, prec_bits)
    two = 1 << (s - 1)
    secondary = BigReal(trunc_div(eta.mantissa * two, two - 1), eta.scale_bits, prec_bits)
    w = min(primary.scale_bits, secondary.scale_bits)
    _agree(
        primary.at_scale(w).mantissa, secondary.at_scale(w).mantissa, w, prec_bits, f"zeta({s})"
    )
    return primary


# ---------------------------------------------------------------------------
# Clausen and Glaisher functions at rational multiples of pi
# ---------------------------------------------------------------------------


def _unit_circle_part(
    s: int, p: int, q: int, kind: Literal["cos", "sin"], prec_bits: int
) -> BigReal:
    """sum_k trig(k pi p/q) / k**s via Li_s(e^{2 pi i m/M}) = M^-s sum_r e^{2 pi i m r/M} zeta(s, r/M)."""
    if s < 2:
        raise ValueError(f"order must be at least 2, got {s}")
    if q < 1:
        raise ValueError(f"denominator must be positive, got {q}")
    g = math.gcd(p, q)
    p, q = p // g, q // g
    if 6 % q:
        raise OracleError(f"angle pi*{p}/{q}: only denominators dividing 6 are supported")
    M = 2 * q
    w = prec_bits + 16
    rational, radical = BigReal.zero(w), BigReal.zero(w)
    for r in range(1, M + 1):
        weight, root = trig_pi6(6 * p * r // q, kind)
        if weight == 0:
            continue
        z = hurwitz_zeta(s, Fraction(r, M), w) * weight
        if root:
            radical = radical + z
        else:
            rational = rational + z
    if not radical.is_zero():
        rational = rational + radical * sqrt3(w)
    return BigReal(
        trunc_div(rational.mantissa, M**s), rational.scale_bits, prec_bits
    )


def clausen(s: int, p: int, q: int, prec_bits: int) -> BigReal:
    """Cl_s(pi p/q): sum sin(kx)/k^s for even s, sum cos(kx)/k^s for odd s."""
    return _unit_circle_part(s, p, q, "sin" if s % 2 == 0 else "cos", prec_bits)


def glaisher_series(order: int, p: int, q: int, prec_bits: int) -> BigReal:
    """Gl_n(pi p/q): sum cos(kx)/k^n for even n, sum sin(kx)/k^n for odd n."""
    return _unit_circle_part(order, p, q, "cos" if order % 2 == 0 else "sin", prec_bits)


def glaisher_closed_form(n: int, p: int, q: int) -> ConstantExpr:
    """Gl_n(pi p/q) for even n as an exact multiple of pi**n.

    Gl_{2m}(x) = (-1)**(m+1) (2 pi)**(2m) B_{2m}(x / 2pi) / (2 (2m)!) on [0, 2pi].
    """
    if n < 2 or n % 2:
        raise ValueError(f"closed form needs an even order >= 2, got {n}")
    if q < 1:
        raise ValueError(f"denominator must be positive, got {q}")
    t = Fraction(p % (2 * q), 2 * q)
    m = n // 2
    sign = 1 if m % 2 else -1
    c = sign * Fraction(2**n) * eval_poly(bernoulli_poly(n), t) / (2 * math.factorial(n))
    return ConstantExpr.constant("pi", c, n) if c else ConstantExpr()


# ---------------------------------------------------------------------------
# Constant table
# ---------------------------------------------------------------------------


class StoredConstant(NamedTuple):
    value: BigReal
    prec_bits: int
    method: str


_METHODS: dict[str, tuple[str, Callable[[int], BigReal]]] = {
    "pi": ("machin", pi),
    "ln2": ("atanh", ln2),
    "ln3": ("atanh", ln3),
    "zeta3": ("euler-maclaurin", lambda prec: zeta(3, prec)),
    "zeta5": ("euler-maclaurin", lambda prec: zeta(5, prec)),
    "cl2_pi3": ("hurwitz-roots", lambda prec: clausen(2, 1, 3, prec)),
    "cl4_pi3": ("hurwitz-roots", lambda prec: clausen(4, 1, 3, prec)),
    "sqrt3": ("isqrt", sqrt3),
}


class ConstantTable:
    """Memoized constants; a higher-precision request replaces the entry.

    A replacement must agree with the stored value to the stored precision.
    """

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._values: dict[str, StoredConstant] = {}

    def get(self, name: str, prec_bits: int) -> BigReal:
        if name not in _METHODS:
            raise OracleError(f"unknown constant {name!r}; allowed: {', '.join(CONSTANT_NAMES)}")
        with self._lock:
            stored = self._values.get(name)
            if stored is not None and stored.prec_bits >= prec_bits:
                return stored.value
            method, compute = _METHODS[name]
            value = compute(prec_bits)
            if stored is not None:
                w = min(stored.value.scale_bits, value.scale_bits)
                _agree(
                    stored.value.at_scale(w).mantissa,
                    value.at_scale(w).mantissa,
                    w,
                    stored.prec_bits,
                    f"{name} extension",
                )
            self._values[name] = StoredConstant(value, prec_bits, method)
            logger.info("Computed %s to %d bits (%s)", name, prec_bits, method)
            return value

    def method(self, name: str) -> str | None:
        with self._lock:
            stored = self._values.get(name)
            return stored.method if stored else None

    def __contains__(self, name: object) -> bool:
        with self._lock:
            return name in self._values


DEFAULT_TABLE = ConstantTable()


def constant_value(name: str, prec_bits: int) -> BigReal:
    return DEFAULT_TABLE.get(name, prec_bits)
