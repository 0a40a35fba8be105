"""Tests for the P-notation parser, printer and formula algebra."""

import random
from fractions import Fraction

import pytest

from ternarybbp.catalog import load_catalog
from ternarybbp.models import BbpFormula, ConstantExpr
from ternarybbp.notation import (
    ParseError,
    ShapeError,
    combine,
    format_constant_expr,
    parse,
    parse_constant_expr,
    print_formula,
    rescale,
    term_vector,
    terms_equal,
)
from ternarybbp.series import eval_bbp


def _make_random_formula(rng: random.Random) -> BbpFormula:
    n = rng.randint(1, 12)
    num = rng.choice([-1, 1]) * rng.randint(1, 3**7)
    den = rng.randint(1, 3**7)
    return BbpFormula(
        scale=Fraction(num, den),
        degree_s=rng.randint(1, 6),
        base_b=rng.choice([-1, 1]) * rng.randint(2, 3**6),
        length_n=n,
        coeffs=tuple(rng.randint(-(3**8), 3**8) for _ in range(n)),
    )


def test_parse_simple():
    f = parse("6 P((1,-3,2,(1,0)))")
    assert f.scale == 6
    assert f.shape == (1, -3, 2)
    assert f.coeffs == (1, 0)
    assert print_formula(f) == "6 P((1,-3,2,(1,0)))"


def test_parse_powers_and_products():
    f = parse("1/(2*3^5) P((1,3^6,12,(3^5,3^5,0,-3^4,-3^3,0,-3^2,-3^2,0,3,1,0)))")
    assert f.scale == Fraction(1, 486)
    assert f.base_b == 729
    assert f.coeffs[:4] == (243, 243, 0, -81)


def test_parse_typeset_symbols():
    f = parse("2·3 P((1,−3,1,(−1)))")
    assert f.scale == 6
    assert f.base_b == -3
    assert f.coeffs == (-1,)


def test_scale_one_is_omitted():
    assert print_formula(parse("P((2,9,2,(9,1)))")) == "P((2,9,2,(9,1)))"
    assert print_formula(parse("1 P((2,9,2,(9,1)))")) == "P((2,9,2,(9,1)))"
    assert print_formula(parse("6/4 P((2,9,2,(9,1)))")) == "3/2 P((2,9,2,(9,1)))"


@pytest.mark.parametrize(
    "text, kind, position",
    [
        ("P((1,3,3,(1,2)))", "length", 9),
        ("P((1,1,1,(1)))", "base", 5),
        ("P((0,3,1,(1)))", "degree", 3),
        ("1/0 P((1,3,1,(1)))", "scale", 0),
        ("P((1,3,1,(1#)))", "token", 11),
        ("P((1,3,1,(1))", "token", 13),
    ],
)
def test_parse_errors_are_positioned(text, kind, position):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.kind == kind
    assert info.value.position == position


def test_parse_rejects_trailing_text():
    with pytest.raises(ParseError, match="trailing"):
        parse("P((1,3,1,(1))) extra")


def test_print_parse_roundtrip_random():
    rng = random.Random(20240611)
    for _ in range(10_000):
        f = _make_random_formula(rng)
        assert parse(print_formula(f)) == f


def test_combine_extracts_content():
    f = parse("2/3 P((1,9,2,(1,0)))")
    doubled = combine([(3, f)])
    assert doubled.scale == 2
    assert doubled.coeffs == (1, 0)
    zero = combine([(1, f), (-1, f)])
    assert zero.coeffs == (0, 0)
    assert zero.scale == 1
    assert zero.is_zero()


def test_combine_shape_mismatch():
    with pytest.raises(ShapeError, match="rescale"):
        combine([(1, parse("P((1,9,2,(1,0)))")), (1, parse("P((1,-3,2,(1,0)))"))])
    with pytest.raises(ShapeError):
        combine([])


def test_combine_ln2_difference():
    # Li1(1/3) - Li1(-1/3) = ln 2
    third = parse("1/9 P((1,9,2,(3,1)))")
    negthird = parse("1/9 P((1,9,2,(-3,1)))")
    assert terms_equal(combine([(1, third), (-1, negthird)]), parse("2/3 P((1,9,2,(1,0)))"))


def test_terms_equal_ignores_typography():
    assert terms_equal(parse("2 P((1,9,2,(3,0)))"), parse("3 P((1,9,2,(2,0)))"))
    assert not terms_equal(parse("P((1,9,2,(1,0)))"), parse("P((1,-9,2,(1,0)))"))
    assert term_vector(parse("1/2 P((1,9,2,(3,1)))")) == (Fraction(3, 2), Fraction(1, 2))


def test_rescale_blocks_base():
    f = parse("1/3 P((2,-3,2,(1,0)))")
    assert print_formula(rescale(f, 3)) == "1/27 P((2,-27,6,(9,0,-3,0,1,0)))"


def test_rescale_with_spread():
    ln2 = parse("2/3 P((1,9,2,(1,0)))")
    expected = parse("4/3^5 P((1,3^6,12,(0,3^4,0,0,0,3^2,0,0,0,1,0,0)))")
    out = rescale(ln2, 3, spread=2)
    assert out == expected


def test_rescale_identity_and_errors():
    f = parse("P((1,9,2,(1,0)))")
    assert rescale(f, 1) is f
    with pytest.raises(ValueError):
        rescale(f, 0)


def test_rescale_makes_scale_positive():
    f = parse("P((1,-3,1,(1)))")
    out = rescale(f, 2)
    assert out.scale > 0
    assert terms_equal(out, parse("1/3 P((1,9,2,(3,-1)))"))


def test_constant_expr_roundtrip():
    text = "13*zeta3 - 1*pi^2*ln3 + 1*ln3^3"
    expr = parse_constant_expr(text)
    assert expr.names() == {"zeta3", "pi", "ln3"}
    assert parse_constant_expr(format_constant_expr(expr)) == expr


def test_constant_expr_merges_and_folds_sqrt3():
    assert parse_constant_expr("1/2*pi + 1/2*pi") == ConstantExpr.constant("pi")
    assert parse_constant_expr("sqrt3^2") == ConstantExpr.rational(3)
    assert parse_constant_expr("0").is_zero()
    assert format_constant_expr(parse_constant_expr("0")) == "0"


def test_constant_expr_unknown_name():
    with pytest.raises(ParseError, match="allowed"):
        parse_constant_expr("2*catalan")


def _value(f: BbpFormula, bits: int = 200) -> Fraction:
    return eval_bbp(f, bits).value.to_fraction()


def test_rescale_preserves_value_on_negative_bases():
    entries = [e for e in load_catalog() if e.rhs.base_b < 0 and abs(e.rhs.base_b) <= 27]
    assert entries
    for e in entries:
        original = _value(e.rhs)
        for block in (1, 2, 3, 6):
            for spread in (1, 2):
                out = rescale(e.rhs, block, spread=spread)
                assert out.base_b == e.rhs.base_b**block
                assert out.length_n == e.rhs.length_n * block * spread
                assert abs(_value(out) - original) < Fraction(1, 2**190), (e.name, block, spread)


def test_combine_is_exact_linear_algebra():
    rng = random.Random(77)
    for _ in range(50):
        s, b, n = rng.randint(1, 4), rng.choice([9, -9, 27, -27]), rng.randint(1, 6)
        parts = []
        for _ in range(3):
            f = BbpFormula(
                scale=Fraction(rng.choice([-1, 1]), rng.randint(1, 50)),
                degree_s=s,
                base_b=b,
                length_n=n,
                coeffs=tuple(rng.randint(-99, 99) for _ in range(n)),
            )
            parts.append((Fraction(rng.randint(-50, 50), rng.randint(1, 50)), f))
        combined = combine(parts)
        expected = [sum((w * term_vector(f)[j] for w, f in parts), Fraction(0)) for j in range(n)]
        assert list(term_vector(combined)) == expected
        direct = sum((w * _value(f) for w, f in parts), Fraction(0))
        assert abs(_value(combined) - direct) < Fraction(1, 2**170)


def test_huge_exponent_is_a_positioned_error():
    text = "P((1,3,1,(10^999999999)))"
    with pytest.raises(ParseError, match="exceeds") as info:
        parse(text)
    assert info.value.position == text.index("999999999")
    assert parse("P((1,3,1,(1^999999999)))").coeffs == (1,)
    assert parse("3^6 P((1,3,1,(1)))").scale == 729


def test_constant_power_is_bounded():
    with pytest.raises(ParseError, match="power of sqrt3"):
        parse_constant_expr("sqrt3^999999999")
    assert parse_constant_expr("pi^64").names() == {"pi"}
