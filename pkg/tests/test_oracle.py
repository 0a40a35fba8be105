"""Tests for the independent constant oracle."""

import math
import random
from fractions import Fraction

import pytest

from ternarybbp import oracle
from ternarybbp.hp import BigReal, to_radix_string
from ternarybbp.models import ConstantExpr
from ternarybbp.oracle import (
    BernoulliCache,
    ConstantTable,
    OracleError,
    bernoulli,
    bernoulli_poly,
    clausen,
    eval_poly,
    glaisher_closed_form,
    glaisher_series,
    hurwitz_zeta,
    zeta,
)


def _close(a: BigReal, b: BigReal | Fraction, bits: int) -> bool:
    other = b.to_fraction() if isinstance(b, BigReal) else b
    return abs(a.to_fraction() - other) < Fraction(1, 2**bits)


@pytest.mark.parametrize(
    "name, expected",
    [
        ("pi", "3.141592653589793238462643383279"),
        ("ln2", "0.693147180559945309417232121458"),
        ("ln3", "1.098612288668109691395245236922"),
        ("sqrt3", "1.732050807568877293527446341505"),
        ("zeta3", "1.202056903159594285399738161511"),
        ("zeta5", "1.036927755143369926331365486457"),
        ("cl2_pi3", "1.014941606409653625021202554274"),
    ],
)
def test_known_digits(name, expected):
    value = oracle.constant_value(name, 128)
    assert to_radix_string(value, 10, 30) == expected


def test_prefix_stability():
    for compute in (oracle.pi, oracle.ln2, oracle.ln3):
        low, high = compute(64), compute(512)
        assert _close(low, high, 62)


def test_log_atanh_matches_ln2_and_ln3():
    assert oracle.log_atanh(1, 2, 128) == oracle.ln2(128)
    difference = oracle.ln3(128) - oracle.ln2(128) - oracle.log_atanh(2, 3, 128)
    assert abs(difference.to_fraction()) < Fraction(1, 2**125)
    with pytest.raises(ValueError):
        oracle.log_atanh(3, 2, 64)


def test_bernoulli_numbers():
    assert bernoulli(0) == 1
    assert bernoulli(1) == Fraction(-1, 2)
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(10) == Fraction(5, 66)
    assert bernoulli(7) == 0


def test_bernoulli_recurrence_to_64():
    for n in range(1, 65):
        assert sum(math.comb(n + 1, j) * bernoulli(j) for j in range(n + 1)) == 0
        if n > 1 and n % 2:
            assert bernoulli(n) == 0


def test_bernoulli_polynomials():
    assert bernoulli_poly(2) == (Fraction(1, 6), Fraction(-1), Fraction(1))
    for n in range(2, 12):
        coeffs = bernoulli_poly(n)
        assert eval_poly(coeffs, Fraction(0)) == bernoulli(n)
        assert eval_poly(coeffs, Fraction(1)) == eval_poly(coeffs, Fraction(0))


def test_bernoulli_cache_is_independent():
    cache = BernoulliCache()
    assert cache.number(4) == Fraction(-1, 30)
    assert len(cache.numbers) == 5


def test_hurwitz_zeta_two_is_pi_squared_over_six():
    pi = oracle.pi(160)
    assert _close(hurwitz_zeta(2, 1, 128), (pi * pi).to_fraction() / 6, 124)


def test_hurwitz_half_identity():
    # zeta(s, 1/2) = (2^s - 1) zeta(s)
    for s in (2, 3, 5):
        half = hurwitz_zeta(s, Fraction(1, 2), 128)
        full = hurwitz_zeta(s, 1, 128)
        assert _close(half, full.to_fraction() * (2**s - 1), 120)


def test_hurwitz_multiplication_identity():
    # zeta(s, 1/3) + zeta(s, 2/3) + zeta(s, 1) = 3^s zeta(s)
    s = 4
    parts = [hurwitz_zeta(s, Fraction(r, 3), 128) for r in (1, 2, 3)]
    total = sum((p.to_fraction() for p in parts), Fraction(0))
    assert abs(total - 3**s * hurwitz_zeta(s, 1, 128).to_fraction()) < Fraction(1, 2**118)


def test_hurwitz_shift_identity_random():
    # zeta(s, a) = zeta(s, a + 1) + a^-s
    rng = random.Random(1913)
    for _ in range(12):
        s = rng.randint(2, 5)
        a = Fraction(rng.randint(1, 40), rng.randint(1, 12))
        lhs = hurwitz_zeta(s, a, 128).to_fraction()
        rhs = hurwitz_zeta(s, a + 1, 128).to_fraction() + a ** -s
        assert abs(lhs - rhs) < Fraction(1, 2**120), (s, a)


def test_hurwitz_rejects_bad_arguments():
    with pytest.raises(ValueError):
        hurwitz_zeta(1, 1, 64)
    with pytest.raises(ValueError, match="a > 0"):
        hurwitz_zeta(2, 0, 64)
    with pytest.raises(ValueError, match="a > 0"):
        hurwitz_zeta(2, Fraction(-1, 3), 64)


def test_zeta_dual_method_at_512_bits():
    for s in (3, 5):
        assert zeta(s, 512).precision_bits == 512


def test_clausen_zero_angle_and_errors():
    assert clausen(2, 0, 1, 64).is_zero()
    with pytest.raises(ValueError):
        clausen(1, 1, 3, 64)
    with pytest.raises(OracleError, match="denominators"):
        clausen(2, 1, 5, 64)


@pytest.mark.parametrize("s", [2, 3, 4, 5])
def test_clausen_duplication(s):
    # Cl_s(2x) / 2^(s-1) = Cl_s(x) + Cl_s(x + pi) at x = pi/3
    lhs = clausen(s, 2, 3, 128).to_fraction() / 2 ** (s - 1)
    rhs = clausen(s, 1, 3, 128).to_fraction() + clausen(s, 4, 3, 128).to_fraction()
    assert abs(lhs - rhs) < Fraction(1, 2**120)


def test_clausen_against_mpmath():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.prec = 200
    for s, expected in ((2, mpmath.clsin(2, mpmath.pi / 3)), (4, mpmath.clsin(4, mpmath.pi / 3))):
        value = clausen(s, 1, 3, 150)
        assert abs(mpmath.mpf(value.mantissa) / mpmath.mpf(2) ** value.scale_bits - expected) < mpmath.mpf(2) ** -140


def test_glaisher_closed_forms():
    assert glaisher_closed_form(2, 1, 3) == ConstantExpr.constant("pi", Fraction(1, 36), 2)
    assert glaisher_closed_form(2, 0, 1) == ConstantExpr.constant("pi", Fraction(1, 6), 2)
    assert glaisher_closed_form(4, 0, 1) == ConstantExpr.constant("pi", Fraction(1, 90), 4)
    with pytest.raises(ValueError):
        glaisher_closed_form(3, 1, 3)


@pytest.mark.parametrize("n, p, q", [(2, 1, 3), (2, 1, 2), (4, 1, 3), (6, 1, 6)])
def test_glaisher_series_matches_closed_form(n, p, q):
    expr = glaisher_closed_form(n, p, q)
    (term,) = expr.terms
    pi = oracle.pi(160).to_fraction()
    expected = term.coefficient * pi**n
    assert abs(glaisher_series(n, p, q, 128).to_fraction() - expected) < Fraction(1, 2**120)


def test_constant_table_memoizes_and_tags():
    table = ConstantTable()
    first = table.get("ln3", 64)
    assert "ln3" in table
    assert table.method("ln3") == "atanh"
    assert table.get("ln3", 32) is first
    higher = table.get("ln3", 256)
    assert _close(first, higher, 62)
    with pytest.raises(OracleError, match="unknown constant"):
        table.get("catalan", 64)
