"""Tests for ternary digit extraction."""

import random

import pytest
from pydantic import ValidationError

from ternarybbp import oracle
from ternarybbp.catalog import get_entry, load_catalog
from ternarybbp.extract import CONFIRM_OFFSET, _pass, extract, extract_parallel, working_bits
from ternarybbp.hp import BigReal, to_radix_string
from ternarybbp.models import BbpFormula, ExtractionRequest
from ternarybbp.notation import parse

ORACLE_BITS = 3400


def _make_request(formula: BbpFormula | str, position: int, count: int = 8, guard: int = 24) -> ExtractionRequest:
    if isinstance(formula, str):
        formula = get_entry(load_catalog(), formula).rhs
    return ExtractionRequest(formula=formula, position=position, count=count, guard=guard)


def _oracle_window(value: BigReal, position: int, count: int) -> str:
    fraction = to_radix_string(value, 3, position + count).split(".")[1]
    return fraction[position : position + count]


def _oracle_values() -> dict[str, BigReal]:
    pi = oracle.pi(ORACLE_BITS)
    ln3 = oracle.ln3(ORACLE_BITS)
    return {
        "ln2_base729": oracle.ln2(ORACLE_BITS),
        "ln2_base9": oracle.ln2(ORACLE_BITS),
        "ln3_base729": ln3,
        "ln3_alt": ln3,
        "pisqrt3_base729": pi * oracle.sqrt3(ORACLE_BITS),
        "pisqrt3_base729b": pi * oracle.sqrt3(ORACLE_BITS),
        "pi2": pi * pi,
    }


def test_ln2_leading_digits():
    result = extract(_make_request("ln2_base729", 0))
    assert result.digits == "20020102"
    assert result.position == 0
    assert result.confidence_margin >= 1
    assert result.terms_used > 0


def test_pisqrt3_skips_integer_part():
    value = oracle.pi(200) * oracle.sqrt3(200)
    result = extract(_make_request("pisqrt3_base729b", 0, count=5))
    assert result.digits == _oracle_window(value, 0, 5)


def test_shift_consistency():
    rng = random.Random(7)
    for _ in range(5):
        t = rng.randrange(1, 400)
        a = extract(_make_request("ln3_base729", t, count=10))
        b = extract(_make_request("ln3_base729", t + 1, count=9))
        assert a.digits[1:] == b.digits


def test_matches_oracle_at_random_positions():
    values = _oracle_values()
    rng = random.Random(11)
    for name, value in values.items():
        for _ in range(6):
            t = rng.randrange(0, 600)
            assert extract(_make_request(name, t)).digits == _oracle_window(value, t, 8), (name, t)


@pytest.mark.slow
def test_matches_oracle_fifty_positions_below_2000():
    values = _oracle_values()
    rng = random.Random(2000)
    for name, value in values.items():
        for _ in range(50):
            t = rng.randrange(0, 2000 - 16)
            assert extract(_make_request(name, t, count=16)).digits == _oracle_window(value, t, 16)


def test_negative_base_matches_positive_base():
    for t in (0, 5, 37, 250):
        assert extract(_make_request("ln3_alt", t)).digits == extract(_make_request("ln3_base729", t)).digits


def test_formula_independence():
    rng = random.Random(3)
    for _ in range(4):
        t = rng.randrange(0, 3000)
        assert extract(_make_request("ln2_base729", t)).digits == extract(_make_request("ln2_base9", t)).digits
        assert (
            extract(_make_request("pisqrt3_base729", t)).digits
            == extract(_make_request("pisqrt3_base729b", t)).digits
        )


def test_parallel_matches_serial():
    req = _make_request("ln2_base729", 10_000, count=12)
    serial = extract(req)
    assert extract_parallel(req, 3) == serial
    # more workers than blocks leaves empty ranges
    short = _make_request("ln2_base729", 2, count=6)
    assert extract_parallel(short, 4) == extract(short)


def test_non_ternary_base_rejected():
    with pytest.raises(ValidationError, match="not"):
        _make_request(parse("P((1,10,1,(1)))"), 0)
    with pytest.raises(ValidationError):
        _make_request("ln2_base729", 0, count=65)


def test_working_bits():
    assert working_bits(16, 24) == 64 + 16


@pytest.mark.slow
def test_deep_position_overlap():
    t = 10**6
    deep = extract(_make_request("ln2_base729", t, count=16))
    earlier = extract(_make_request("ln2_base729", t - 12, count=16))
    assert earlier.digits[12:] == deep.digits[:4]


def test_margin_comes_from_confirmation_pass():
    count, guard = 8, 24
    for name, t in (("ln3_base729", 40), ("ln2_base9", 3)):
        req = _make_request(name, t, count=count, guard=guard)
        result = extract(req)
        offset = min(t, CONFIRM_OFFSET)
        primary = _pass(req.formula, t, count + guard, working_bits(count, guard), 1)
        confirm = _pass(req.formula, t - offset, count + offset + guard, working_bits(count + offset, guard), 1)
        shared = min(confirm.settled() - offset, primary.settled())
        assert result.confidence_margin == shared - count >= 1


def test_margin_at_position_zero_uses_primary_pass():
    req = _make_request("ln2_base729", 0)
    primary = _pass(req.formula, 0, req.count + req.guard, working_bits(req.count, req.guard), 1)
    assert extract(req).confidence_margin == primary.settled() - req.count
