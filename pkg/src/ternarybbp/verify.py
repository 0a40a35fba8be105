"""Verification harness: catalog entries, zero relations, identities, tables."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .catalog import entries_of_kind, load_catalog, parse_series
from .hp import BigReal
from .models import (
    CatalogEntry,
    ConstantExpr,
    EntryKind,
    Radical,
    SeriesTerm,
    TableCheck,
    VerificationOutcome,
)
from .notation import ShapeError, combine, parse_constant_expr, print_formula, terms_equal
from .oracle import OracleError, constant_value
from .series import MultisectionError, eval_bbp, multisect, polylog_part

logger = logging.getLogger(__name__)

MIN_DIGITS = 20

# Decimal digits of slack between the working precision and the pass threshold.
THRESHOLD_SLACK = 10


class VerificationError(ValueError):
    """A check could not be run (bad precision, unknown constant, bad catalog)."""


def precision_for(decimal_digits: int) -> int:
    if decimal_digits < MIN_DIGITS:
        raise VerificationError(f"need at least {MIN_DIGITS} decimal digits, got {decimal_digits}")
    return math.ceil(decimal_digits * math.log2(10)) + 64


def threshold_for(decimal_digits: int, prec_bits: int) -> BigReal:
    return BigReal.from_fraction(Fraction(1, 10 ** (decimal_digits - THRESHOLD_SLACK)), prec_bits)


def evaluate_constant_expr(expr: ConstantExpr, prec_bits: int) -> BigReal:
    """Sum of coefficient * product of oracle constants, at prec_bits."""
    w = prec_bits + 32
    total = BigReal.zero(w)
    for term in expr.terms:
        value = BigReal.from_int(1, w)
        for name, power in term.monomial:
            try:
                value = value * constant_value(name, w) ** power
            except OracleError as exc:
                raise VerificationError(str(exc)) from exc
        total = total + value * term.coefficient
    return total


def series_value(terms: Iterable[SeriesTerm], prec_bits: int) -> BigReal:
    """sum of weight * part(Li_s(point)) by direct series at the instantiated points."""
    w = prec_bits + 32
    total = BigReal.zero(w)
    for t in terms:
        total = total + polylog_part(t.point, t.part, w) * t.weight
    return total


def _outcome(
    name: str, cite: str, lhs: BigReal, rhs: BigReal, decimal_digits: int, prec_bits: int
) -> VerificationOutcome:
    diff = abs(lhs - rhs)
    threshold = threshold_for(decimal_digits, prec_bits)
    passed = diff < threshold
    if not passed:
        logger.warning("%s failed at %d digits: |diff| = %.3e", name, decimal_digits, float(diff))
    return VerificationOutcome(
        entry_name=name,
        lhs_value=lhs,
        rhs_value=rhs,
        abs_diff=diff,
        threshold=threshold,
        passed=passed,
        citation=cite,
        digits=decimal_digits,
    )


# ---------------------------------------------------------------------------
# Catalog entries
# ---------------------------------------------------------------------------


def verify_entry(e: CatalogEntry, decimal_digits: int) -> VerificationOutcome:
    """Compare the closed form (or series side) of an entry with its BBP sum."""
    prec = precision_for(decimal_digits)
    rhs = eval_bbp(e.rhs, prec).value
    if e.kind is EntryKind.EXPANSION:
        assert e.series is not None
        lhs = series_value([e.series], prec)
        if e.radical is Radical.SQRT3:
            rhs = rhs * constant_value("sqrt3", prec + 32)
    else:
        assert e.lhs is not None
        lhs = evaluate_constant_expr(e.lhs, prec)
    return _outcome(e.name, e.citation, lhs, rhs, decimal_digits, prec)


def _verify_pair(args: tuple[CatalogEntry, int]) -> VerificationOutcome:
    return verify_entry(*args)


def verify_catalog(
    entries: Sequence[CatalogEntry], decimal_digits: int, *, workers: int = 1
) -> list[VerificationOutcome]:
    """verify_entry over every entry, sorted by name; entries run in a pool when workers > 1."""
    jobs = [(e, decimal_digits) for e in entries]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_verify_pair, jobs))
    else:
        outcomes = [_verify_pair(job) for job in jobs]
    return sorted(outcomes, key=lambda o: o.entry_name)


# ---------------------------------------------------------------------------
# Zero relations
# ---------------------------------------------------------------------------


def verify_zero_relations(
    decimal_digits: int, entries: Sequence[CatalogEntry] | None = None
) -> list[VerificationOutcome]:
    """Every zero relation, plus the half-sum and half-difference of the first two."""
    entries = load_catalog() if entries is None else entries
    relations = entries_of_kind(entries, EntryKind.ZERO_RELATION)
    if not relations:
        raise VerificationError("catalog has no zero relations")
    prec = precision_for(decimal_digits)
    zero = BigReal.zero(prec)
    outcomes = [verify_entry(e, decimal_digits) for e in relations]

    if len(relations) >= 2:
        first, second = relations[0], relations[1]
        try:
            derived = {
                f"{first.name}+{second.name}": combine(
                    [(Fraction(1, 2), first.rhs), (Fraction(1, 2), second.rhs)]
                ),
                f"{first.name}-{second.name}": combine(
                    [(Fraction(1, 2), first.rhs), (Fraction(-1, 2), second.rhs)]
                ),
            }
        except ShapeError as exc:
            raise VerificationError(f"zero relations cannot be combined: {exc}") from exc
        for name, formula in derived.items():
            logger.debug("derived relation %s = %s", name, print_formula(formula))
            value = eval_bbp(formula, prec).value
            outcomes.append(_outcome(name, "combine", zero, value, decimal_digits, prec))
    return sorted(outcomes, key=lambda o: o.entry_name)


# ---------------------------------------------------------------------------
# Derivation identities
# ---------------------------------------------------------------------------


class Identity(NamedTuple):
    """constant side == sum of weighted polylog parts."""

    name: str
    cite: str
    constant: str
    series: tuple[str, ...]


IDENTITIES: tuple[Identity, ...] = (
    Identity(
        "reli2_pi6",
        "equ.p12ua6j",
        "5/72*pi^2 - 1/8*ln3^2",
        ("1 * Re Li2[3, 1/6]",),
    ),
    Identity(
        "imli2_pi6",
        "equ.og6rqzy",
        "2/3*cl2_pi3 - 1/12*pi*ln3",
        ("1 * Im Li2[3, 1/6]",),
    ),
    Identity(
        "li2_thirds",
        "equ.q21efos",
        "1/12*pi^2 - 1/4*ln3^2",
        ("1 * Re Li2[9, 0/1]", "-1/2 * Re Li2[9, 1/1]"),
    ),
    Identity(
        "imli2_pi2",
        "equ.qiq0qug",
        "5/2*cl2_pi3 - 1/4*pi*ln3",
        ("3 * Im Li2[3, 1/2]",),
    ),
    Identity(
        "li3_thirds",
        "trilog x=2",
        "13/6*zeta3 - 1/6*pi^2*ln3 + 1/6*ln3^3",
        ("2 * Re Li3[9, 0/1]", "-1 * Re Li3[9, 1/1]"),
    ),
    Identity(
        "reli3_pi6",
        "equ.thgd6ju",
        "13/18*zeta3 - 5/144*pi^2*ln3 + 1/48*ln3^3",
        ("1 * Re Li3[3, 1/6]",),
    ),
    Identity(
        "imli3_mix",
        "equ.hv0t3gq",
        "29/1296*pi^3 - 1/48*pi*ln3^2",
        ("4 * Im Li3[3, 1/2]", "-5 * Im Li3[3, 1/6]"),
    ),
    Identity(
        "reli4_mix",
        "equ.u7f27ai",
        "-127/10368*pi^4 + 1/64*pi^2*ln3^2 - 5/384*ln3^4",
        (
            "-12 * Re Li4[3, 1/2]",
            "-3 * Re Li4[3, 1/6]",
            "1 * Re Li4[9, 0/1]",
            "1/4 * Re Li4[9, 1/1]",
        ),
    ),
    Identity(
        "imli4_mix",
        "equ.xnlkxjb",
        "29/864*pi^3*ln3 - 1/96*pi*ln3^3 - 11/3*cl4_pi3",
        ("-12 * Im Li4[3, 1/2]", "15 * Im Li4[3, 1/6]"),
    ),
    Identity(
        "reli5_mix",
        "equ.xmekn9g",
        "1/64*pi^2*ln3^3 - 127/3456*pi^4*ln3 - 1/128*ln3^5 + 1573/144*zeta5",
        ("18 * Re Li5[3, 1/6]", "3/2 * Re Li5[9, 1/1]", "-3 * Re Li5[9, 0/1]"),
    ),
)


def check_identity(identity: Identity, decimal_digits: int) -> VerificationOutcome:
    prec = precision_for(decimal_digits)
    lhs = evaluate_constant_expr(parse_constant_expr(identity.constant), prec)
    rhs = series_value([parse_series(text) for text in identity.series], prec)
    return _outcome(identity.name, identity.cite, lhs, rhs, decimal_digits, prec)


def verify_identities(decimal_digits: int) -> list[VerificationOutcome]:
    outcomes = [check_identity(identity, decimal_digits) for identity in IDENTITIES]
    return sorted(outcomes, key=lambda o: o.entry_name)


# ---------------------------------------------------------------------------
# Expansion tables
# ---------------------------------------------------------------------------


def check_table(e: CatalogEntry) -> TableCheck:
    """Regenerate an expansion entry's table in its stored base and length."""
    if e.series is None:
        raise VerificationError(f"{e.name} is not an expansion entry")
    stored = e.rhs
    try:
        generated, radical = multisect(
            e.series.point, e.series.part, base=stored.base_b, length=stored.length_n
        )
    except MultisectionError as exc:
        return TableCheck(
            entry_name=e.name,
            citation=e.citation,
            status="mismatch",
            generated=stored,
            stored=stored,
            detail=str(exc),
        )
    generated = combine([(e.series.weight, generated)])

    if terms_equal(generated, stored) and radical is e.radical:
        if e.printed is not None:
            status, detail = "printed differs", e.note or f"printed {print_formula(e.printed)}"
        else:
            status, detail = "match", ""
    else:
        status = "mismatch"
        detail = f"generated {print_formula(generated)} ({radical.value})"
    return TableCheck(
        entry_name=e.name,
        citation=e.citation,
        status=status,
        generated=generated,
        stored=stored,
        detail=detail,
    )


def regenerate_tables(entries: Sequence[CatalogEntry] | None = None) -> list[TableCheck]:
    entries = load_catalog() if entries is None else entries
    checks = [check_table(e) for e in entries_of_kind(entries, EntryKind.EXPANSION)]
    logger.info(
        "Regenerated %d tables, %d mismatches",
        len(checks),
        sum(c.status == "mismatch" for c in checks),
    )
    return sorted(checks, key=lambda c: c.entry_name)
