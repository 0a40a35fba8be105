"""Typer CLI entry point for ternarybbp.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 indeterminate digit extraction.
"""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Optional

import typer
from dotenv import load_dotenv
from rich.console import Console
from rich.logging import RichHandler

from .models import BbpFormula, CatalogEntry, CliConfig, VerificationOutcome

load_dotenv()

app = typer.Typer(help="Ternary BBP-type formulas: parse, evaluate, verify and extract digits")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INDETERMINATE = 3

CatalogOption = Annotated[
    Optional[Path], typer.Option("--file", help="Catalog file (overrides TB_CATALOG and the built-in)")
]
WorkersOption = Annotated[Optional[int], typer.Option("--workers", "-w", help="Worker processes")]


@dataclass
class _State:
    json_flag: bool = False
    json_mode: bool = False


state = _State()


@app.callback()
def main(
    json_mode: Annotated[bool, typer.Option("--json", help="Machine-readable JSON output")] = False,
    verbose: Annotated[int, typer.Option("--verbose", "-v", count=True, help="-v info, -vv debug")] = 0,
) -> None:
    """Ternary BBP-type formulas for polylogarithm constants."""
    state.json_flag = json_mode
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _fail(message: str, code: int = EXIT_USAGE) -> typer.Exit:
    typer.echo(f"Error: {message}", err=True)
    return typer.Exit(code)


def _config(**overrides: object) -> CliConfig:
    from .config import load_config

    try:
        config = load_config(output_mode="json" if state.json_flag else None, **overrides)
    except ValueError as exc:
        raise _fail(str(exc)) from exc
    state.json_mode = config.output_mode == "json"
    return config


def _entries(config: CliConfig, file: Path | None) -> list[CatalogEntry]:
    from .catalog import CatalogError, load_catalog

    path = file or config.catalog_path
    try:
        return load_catalog(path)
    except (CatalogError, OSError) as exc:
        raise _fail(f"cannot load catalog: {exc}") from exc


def _entry(entries: list[CatalogEntry], name: str) -> CatalogEntry:
    from .catalog import CatalogError, get_entry

    try:
        return get_entry(entries, name)
    except CatalogError as exc:
        raise _fail(str(exc)) from exc


def _echo_json(payload: object) -> None:
    typer.echo(json.dumps(payload, indent=2))


@app.command()
def parse(text: Annotated[str, typer.Argument(help="Formula in P-notation")]) -> None:
    """Parse a formula and print its canonical form."""
    from .notation import ParseError, print_formula
    from .notation import parse as parse_formula

    _config()
    try:
        formula = parse_formula(text)
    except ParseError as exc:
        typer.echo(f"Error: {exc.message}", err=True)
        typer.echo(f"  {text}\n  {' ' * exc.position}^", err=True)
        raise typer.Exit(EXIT_USAGE) from exc
    except ValueError as exc:
        raise _fail(str(exc)) from exc

    if state.json_mode:
        _echo_json({"canonical": print_formula(formula), "formula": formula.model_dump(mode="json")})
    else:
        typer.echo(print_formula(formula))


@app.command(name="eval")
def eval_cmd(
    name: Annotated[Optional[str], typer.Argument(help="Catalog entry name")] = None,
    formula_text: Annotated[Optional[str], typer.Option("--formula", help="Formula in P-notation")] = None,
    digits: Annotated[Optional[int], typer.Option("--digits", "-d", help="Fractional digits")] = None,
    radix: Annotated[int, typer.Option(help="Output radix, 10 or 3")] = 10,
    file: CatalogOption = None,
    workers: WorkersOption = None,
) -> None:
    """Evaluate a catalog entry or a formula to a number of digits."""
    from .hp import PrecisionError, to_radix_string
    from .notation import ParseError
    from .notation import parse as parse_formula
    from .report import format_sci
    from .series import eval_bbp

    config = _config(eval_digits=digits, workers=workers)
    if radix not in (3, 10):
        raise _fail(f"radix must be 3 or 10, got {radix}")
    if (name is None) == (formula_text is None):
        raise _fail("give exactly one of an entry name or --formula")

    formula: BbpFormula
    if formula_text is not None:
        try:
            formula = parse_formula(formula_text)
        except ParseError as exc:
            raise _fail(str(exc)) from exc
    else:
        assert name is not None
        formula = _entry(_entries(config, file), name).rhs

    n = config.eval_digits
    prec = math.ceil((n + 4) * math.log2(radix)) + 16
    report = eval_bbp(formula, prec, workers=config.workers)
    try:
        text = to_radix_string(report.value, radix, n)
    except PrecisionError as exc:
        raise _fail(str(exc)) from exc

    if state.json_mode:
        _echo_json(
            {
                "value": text,
                "radix": radix,
                "digits": n,
                "terms_used": report.terms_used,
                "tail_bound": format_sci(report.tail_bound),
            }
        )
    else:
        typer.echo(text)
        typer.echo(f"({report.terms_used} terms, tail <= {format_sci(report.tail_bound)})", err=True)


@app.command(name="digits")
def digits_cmd(
    name: Annotated[str, typer.Argument(help="Catalog entry name (base +-3^m)")],
    position: Annotated[int, typer.Option("--position", "-t", help="0-indexed ternary position")] = 0,
    count: Annotated[Optional[int], typer.Option("--count", "-c", help="Digits to extract")] = None,
    guard: Annotated[Optional[int], typer.Option("--guard", help="Guard digits")] = None,
    file: CatalogOption = None,
    workers: WorkersOption = None,
) -> None:
    """Extract ternary digits starting at an arbitrary position."""
    from pydantic import ValidationError

    from .extract import (
        ConfirmationMismatchError,
        ExtractionError,
        IndeterminateDigitsError,
        extract_parallel,
    )
    from .models import ExtractionRequest

    config = _config(count=count, guard=guard, workers=workers)
    entry = _entry(_entries(config, file), name)
    try:
        req = ExtractionRequest(
            formula=entry.rhs, position=position, count=config.count, guard=config.guard
        )
    except ValidationError as exc:
        raise _fail(str(exc)) from exc

    try:
        result = extract_parallel(req, config.workers)
    except IndeterminateDigitsError as exc:
        raise _fail(str(exc), EXIT_INDETERMINATE) from exc
    except ConfirmationMismatchError as exc:
        raise _fail(str(exc), EXIT_FAILED) from exc
    except ExtractionError as exc:
        raise _fail(str(exc)) from exc

    if state.json_mode:
        _echo_json({"name": name, **result.model_dump()})
    else:
        typer.echo(result.digits)
        typer.echo(f"(position {result.position}, margin {result.confidence_margin})", err=True)


def _emit_outcomes(outcomes: list[VerificationOutcome], title: str) -> None:
    from .report import outcomes_json, print_outcomes

    if state.json_mode:
        typer.echo(outcomes_json(outcomes))
    else:
        print_outcomes(outcomes, title)
    if not all(o.passed for o in outcomes):
        raise typer.Exit(EXIT_FAILED)


@app.command()
def verify(
    entry: Annotated[Optional[str], typer.Option("--entry", "-e", help="Verify one entry")] = None,
    digits: Annotated[Optional[int], typer.Option("--digits", "-d", help="Decimal digits")] = None,
    file: CatalogOption = None,
    workers: WorkersOption = None,
) -> None:
    """Check catalog formulas against the independent oracle."""
    from .verify import VerificationError, verify_catalog

    config = _config(verify_digits=digits, workers=workers)
    entries = _entries(config, file)
    if entry is not None:
        entries = [_entry(entries, entry)]
    try:
        outcomes = verify_catalog(entries, config.verify_digits, workers=config.workers)
    except VerificationError as exc:
        raise _fail(str(exc)) from exc
    _emit_outcomes(outcomes, f"Catalog verification at {config.verify_digits} digits")


@app.command()
def zero(
    digits: Annotated[Optional[int], typer.Option("--digits", "-d", help="Decimal digits")] = None,
    file: CatalogOption = None,
) -> None:
    """Check the zero relations and their half-sum and half-difference."""
    from .verify import VerificationError, verify_zero_relations

    config = _config(verify_digits=digits)
    try:
        outcomes = verify_zero_relations(config.verify_digits, _entries(config, file))
    except VerificationError as exc:
        raise _fail(str(exc)) from exc
    _emit_outcomes(outcomes, f"Zero relations at {config.verify_digits} digits")


@app.command()
def identities(
    digits: Annotated[Optional[int], typer.Option("--digits", "-d", help="Decimal digits")] = None,
) -> None:
    """Check the polylogarithm identities behind the catalog formulas."""
    from .verify import VerificationError, verify_identities

    config = _config(identity_digits=digits)
    try:
        outcomes = verify_identities(config.identity_digits)
    except VerificationError as exc:
        raise _fail(str(exc)) from exc
    _emit_outcomes(outcomes, f"Identities at {config.identity_digits} digits")


@app.command()
def tables(file: CatalogOption = None) -> None:
    """Regenerate the expansion tables by multisection and diff them."""
    from .report import print_table_checks, table_records
    from .verify import regenerate_tables

    checks = regenerate_tables(_entries(_config(), file))
    if state.json_mode:
        _echo_json(table_records(checks))
    else:
        print_table_checks(checks)
    if any(c.status == "mismatch" for c in checks):
        raise typer.Exit(EXIT_FAILED)


@app.command()
def bench(
    entry: Annotated[str, typer.Option("--entry", "-e", help="Catalog entry name")],
    position: Annotated[int, typer.Option("--position", "-t", help="0-indexed ternary position")],
    count: Annotated[Optional[int], typer.Option("--count", "-c", help="Digits to extract")] = None,
    file: CatalogOption = None,
    workers: WorkersOption = None,
) -> None:
    """Time a digit extraction and report terms per second."""
    from .extract import ExtractionError, IndeterminateDigitsError, extract_parallel
    from .models import ExtractionRequest

    config = _config(count=count, workers=workers)
    formula = _entry(_entries(config, file), entry).rhs
    try:
        req = ExtractionRequest(formula=formula, position=position, count=config.count, guard=config.guard)
    except ValueError as exc:
        raise _fail(str(exc)) from exc

    start = time.perf_counter()
    try:
        result = extract_parallel(req, config.workers)
    except IndeterminateDigitsError as exc:
        raise _fail(str(exc), EXIT_INDETERMINATE) from exc
    except ExtractionError as exc:
        raise _fail(str(exc), EXIT_FAILED) from exc
    elapsed = time.perf_counter() - start
    rate = result.terms_used / elapsed if elapsed > 0 else float("inf")

    if state.json_mode:
        _echo_json(
            {
                "name": entry,
                "position": position,
                "workers": config.workers,
                "seconds": round(elapsed, 6),
                "terms": result.terms_used,
                "terms_per_second": round(rate, 1),
                "digits": result.digits,
            }
        )
    else:
        typer.echo(
            f"{entry} @ {position}: {result.digits}  {elapsed:.3f}s  "
            f"{result.terms_used} terms  {rate:,.0f} terms/s  ({config.workers} worker(s))"
        )


@app.command()
def catalog(file: CatalogOption = None) -> None:
    """List catalog entries with their citations."""
    from .report import catalog_records, print_catalog

    entries = _entries(_config(), file)
    if state.json_mode:
        _echo_json(catalog_records(entries))
    else:
        print_catalog(entries)
