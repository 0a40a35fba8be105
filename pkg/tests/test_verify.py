"""Tests for the verification harness."""

from fractions import Fraction

import pytest

from ternarybbp.catalog import entries_of_kind, get_entry, load_catalog
from ternarybbp.models import CatalogEntry, EntryKind
from ternarybbp.notation import parse_constant_expr
from ternarybbp.verify import (
    IDENTITIES,
    VerificationError,
    evaluate_constant_expr,
    precision_for,
    regenerate_tables,
    verify_catalog,
    verify_entry,
    verify_identities,
    verify_zero_relations,
)


def _make_tampered(entry: CatalogEntry, index: int) -> CatalogEntry:
    coeffs = list(entry.rhs.coeffs)
    coeffs[index] += 1
    rhs = entry.rhs.model_copy(update={"coeffs": tuple(coeffs)})
    return entry.model_copy(update={"rhs": rhs})


def test_precision_for():
    assert precision_for(20) == 67 + 64
    with pytest.raises(VerificationError, match="at least 20"):
        precision_for(10)


def test_evaluate_constant_expr():
    value = evaluate_constant_expr(parse_constant_expr("1*pi*sqrt3"), 100)
    assert abs(float(value) - 5.441398092702653) < 1e-14
    assert evaluate_constant_expr(parse_constant_expr("0"), 64).is_zero()


@pytest.mark.parametrize("name", ["pi2", "ln2_base9", "ln3_alt", "zeta3_base729", "cl4_alt", "zeta5_mix"])
def test_entry_passes(name):
    outcome = verify_entry(get_entry(load_catalog(), name), 50)
    assert outcome.passed, outcome.abs_diff
    assert outcome.entry_name == name
    assert outcome.digits == 50
    assert outcome.abs_diff < outcome.threshold


def test_expansion_entry_with_radical_passes():
    entries = load_catalog()
    for name in ("imli2_pi6_alt", "reli5_pi6_base729", "li5_negthird_base729"):
        assert verify_entry(get_entry(entries, name), 40).passed, name


def test_tampered_coefficient_fails():
    entry = get_entry(load_catalog(), "pi2")
    outcome = verify_entry(_make_tampered(entry, 1), 50)
    assert not outcome.passed
    assert outcome.abs_diff.to_fraction() > Fraction(1, 10**8)


def test_every_nonzero_coefficient_is_load_bearing():
    entries = [e for e in load_catalog() if e.kind is not EntryKind.EXPANSION]
    for e in entries:
        for index, a in enumerate(e.rhs.coeffs):
            if a:
                assert not verify_entry(_make_tampered(e, index), 50).passed, (e.name, index)


@pytest.mark.parametrize("name", ["ln2_base729", "ln3_alt", "pi2", "zeta3_base729", "zero_f51s4o9"])
def test_passing_at_200_digits_implies_passing_at_50(name):
    entry = get_entry(load_catalog(), name)
    fine, coarse = verify_entry(entry, 200), verify_entry(entry, 50)
    assert fine.passed and coarse.passed
    assert fine.threshold < coarse.threshold
    assert abs(fine.abs_diff.to_fraction()) < coarse.threshold.to_fraction()


def test_zero_relations_and_derived_combinations():
    outcomes = verify_zero_relations(60)
    assert len(outcomes) == 4
    assert all(o.passed for o in outcomes)
    names = [o.entry_name for o in outcomes]
    assert names == sorted(names)
    assert any("+" in n for n in names) and any("-" in n for n in names)


def test_zero_relations_need_a_catalog_with_relations():
    formulas = entries_of_kind(load_catalog(), EntryKind.FORMULA)
    with pytest.raises(VerificationError, match="no zero relations"):
        verify_zero_relations(30, formulas)


def test_identities_pass():
    outcomes = verify_identities(40)
    assert len(outcomes) == len(IDENTITIES) == 10
    failed = [o.entry_name for o in outcomes if not o.passed]
    assert failed == []


def test_regenerate_tables():
    checks = {c.entry_name: c for c in regenerate_tables()}
    assert not [name for name, c in checks.items() if c.status == "mismatch"]
    for name in ("reli1_pi2_base729", "reli2_pi6_base729", "reli4_pi6_base729"):
        assert checks[name].status == "printed differs"
    for name in ("reli1_pi6_base729", "li4_third_base729", "imli2_pi6_alt", "li5_third_base729"):
        assert checks[name].status == "match"


def test_verify_catalog_sorted_and_parallel_deterministic():
    entries = [get_entry(load_catalog(), n) for n in ("ln3_base9", "ln2_base9", "pisqrt3_alt")]
    serial = verify_catalog(entries, 30)
    parallel = verify_catalog(entries, 30, workers=2)
    assert [o.entry_name for o in serial] == ["ln2_base9", "ln3_base9", "pisqrt3_alt"]
    assert [o.model_dump() for o in serial] == [o.model_dump() for o in parallel]


@pytest.mark.slow
def test_full_catalog_at_200_digits():
    entries = load_catalog()
    outcomes = verify_catalog(entries, 200)
    assert [o.entry_name for o in outcomes if not o.passed] == []
    coarse = {o.entry_name: o for o in verify_catalog(entries, 50)}
    assert all(coarse[o.entry_name].passed for o in outcomes)
    assert all(o.passed for o in verify_zero_relations(200, entries))


@pytest.mark.slow
def test_identities_at_100_digits():
    assert all(o.passed for o in verify_identities(100))
