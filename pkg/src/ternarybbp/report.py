"""Rich tables and JSON reports for verification, table and catalog output."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Sequence

from rich.console import Console
from rich.table import Table

from .hp import BigReal
from .models import CatalogEntry, TableCheck, VerificationOutcome
from .notation import format_constant_expr, print_formula

console = Console()


def format_sci(x: BigReal | Fraction, places: int = 3) -> str:
    """Decimal scientific notation computed exactly (no float underflow)."""
    q = abs(x.to_fraction() if isinstance(x, BigReal) else Fraction(x))
    if q == 0:
        return "0"
    e = len(str(q.numerator)) - len(str(q.denominator))
    while q < Fraction(10) ** e:
        e -= 1
    while q >= Fraction(10) ** (e + 1):
        e += 1
    mant = q / Fraction(10) ** e
    sign = "-" if (x.sign() if isinstance(x, BigReal) else x) < 0 else ""
    return f"{sign}{float(mant):.{places}f}e{e:+03d}"


def outcome_records(outcomes: Sequence[VerificationOutcome]) -> list[dict[str, Any]]:
    return [
        {
            "name": o.entry_name,
            "cite": o.citation,
            "digits": o.digits,
            "abs_diff": format_sci(o.abs_diff),
            "passed": o.passed,
        }
        for o in outcomes
    ]


def outcomes_json(outcomes: Sequence[VerificationOutcome]) -> str:
    return json.dumps(outcome_records(outcomes), indent=2)


def print_outcomes(outcomes: Sequence[VerificationOutcome], title: str) -> None:
    table = Table(title=title)
    table.add_column("Name")
    table.add_column("Cite")
    table.add_column("Digits", justify="right")
    table.add_column("|lhs - rhs|", justify="right")
    table.add_column("Threshold", justify="right")
    table.add_column("Result")
    for o in outcomes:
        table.add_row(
            o.entry_name,
            o.citation,
            str(o.digits),
            format_sci(o.abs_diff),
            format_sci(o.threshold),
            "[green]pass[/green]" if o.passed else "[red]FAIL[/red]",
        )
    console.print(table)
    failed = sum(not o.passed for o in outcomes)
    console.print(f"{len(outcomes) - failed}/{len(outcomes)} passed")


def table_records(checks: Sequence[TableCheck]) -> list[dict[str, Any]]:
    return [
        {
            "name": c.entry_name,
            "cite": c.citation,
            "status": c.status,
            "generated": print_formula(c.generated),
            "stored": print_formula(c.stored),
            "detail": c.detail,
        }
        for c in checks
    ]


_STATUS_STYLE = {"match": "green", "printed differs": "yellow", "mismatch": "red"}


def print_table_checks(checks: Sequence[TableCheck]) -> None:
    table = Table(title="Multisection tables")
    table.add_column("Name")
    table.add_column("Cite")
    table.add_column("Status")
    table.add_column("Detail", overflow="fold")
    for c in checks:
        style = _STATUS_STYLE[c.status]
        table.add_row(c.entry_name, c.citation, f"[{style}]{c.status}[/{style}]", c.detail)
    console.print(table)


def catalog_records(entries: Sequence[CatalogEntry]) -> list[dict[str, Any]]:
    return [
        {
            "name": e.name,
            "cite": e.citation,
            "kind": e.kind.value,
            "lhs": format_constant_expr(e.lhs) if e.lhs is not None else None,
            "rhs": print_formula(e.rhs),
        }
        for e in entries
    ]


def print_catalog(entries: Sequence[CatalogEntry]) -> None:
    table = Table(title=f"Catalog ({len(entries)} entries)")
    table.add_column("Name")
    table.add_column("Kind")
    table.add_column("Cite")
    table.add_column("Closed form", overflow="fold")
    for e in entries:
        lhs = format_constant_expr(e.lhs) if e.lhs is not None else ""
        table.add_row(e.name, e.kind.value, e.citation, lhs)
    console.print(table)
