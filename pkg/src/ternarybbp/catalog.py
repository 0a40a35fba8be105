"""Plain-text catalog of named BBP formulas.

One record per entry, records separated by blank lines, ``key = value`` lines,
``#`` comments. Keys: ``name``, ``lhs``, ``rhs``, ``cite`` and, for expansion
records, ``series`` and ``radical``; ``printed`` and ``note`` are optional on
any record.
"""

from __future__ import annotations

import logging
import re
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Iterable

from pydantic import ValidationError

from .models import (
    CatalogEntry,
    EntryKind,
    Part,
    PolylogPoint,
    Radical,
    SeriesTerm,
    format_fraction,
)
from .notation import ParseError, format_constant_expr, parse, parse_constant_expr, print_formula

logger = logging.getLogger(__name__)

RECORD_KEYS = ("name", "cite", "lhs", "series", "radical", "rhs", "printed", "note")

_SERIES_RE = re.compile(
    r"^\s*(?:(?P<weight>[-+]?\d+(?:/\d+)?)\s*\*\s*)?"
    r"(?P<part>Re|Im)\s+Li(?P<s>\d+)\s*"
    r"\[\s*(?P<q>\d+)\s*,\s*(?P<m>-?\d+)\s*/\s*(?P<d>\d+)\s*\]\s*$"
)


class CatalogError(ValueError):
    """A catalog record failed to parse or validate."""

    def __init__(self, message: str, record: str = "?", line: int = 0) -> None:
        super().__init__(f"{record} (line {line}): {message}")
        self.record = record
        self.line = line


def default_catalog_path() -> Path:
    return Path(str(resources.files("ternarybbp") / "data" / "catalog.txt"))


# ---------------------------------------------------------------------------
# Series descriptors
# ---------------------------------------------------------------------------


def parse_series(text: str) -> SeriesTerm:
    """``3/2 * Re Li5[9, 1/1]`` -> weight 3/2, real part of Li_5(-1/3)."""
    m = _SERIES_RE.match(text)
    if m is None:
        raise ValueError(f"malformed series descriptor {text!r}; expected '<w> * Re Li<s>[<q>, <m>/<d>]'")
    point = PolylogPoint(
        degree_s=int(m["s"]),
        modulus_q=int(m["q"]),
        angle_m=int(m["m"]),
        angle_d=int(m["d"]),
    )
    return SeriesTerm(weight=Fraction(m["weight"] or 1), part=Part(m["part"]), point=point)


def format_series(series: SeriesTerm) -> str:
    pt = series.point
    return (
        f"{format_fraction(series.weight)} * {series.part.value} Li{pt.degree_s}"
        f"[{pt.modulus_q}, {pt.angle_m}/{pt.angle_d}]"
    )


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


def _split_records(text: str) -> list[list[tuple[int, str]]]:
    records: list[list[tuple[int, str]]] = []
    current: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if current:
                records.append(current)
                current = []
            continue
        current.append((lineno, line))
    if current:
        records.append(current)
    return records


def _build_entry(lines: list[tuple[int, str]]) -> CatalogEntry:
    fields: dict[str, tuple[int, str]] = {}
    record = "?"
    for lineno, line in lines:
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise CatalogError(f"expected 'key = value', got {line!r}", record, lineno)
        if key not in RECORD_KEYS:
            raise CatalogError(
                f"unknown key {key!r}; allowed: {', '.join(RECORD_KEYS)}", record, lineno
            )
        if key in fields:
            raise CatalogError(f"duplicate key {key!r}", record, lineno)
        fields[key] = (lineno, value)
        if key == "name":
            record = value

    first_line = lines[0][0]
    if "name" not in fields:
        raise CatalogError("record has no name", record, first_line)
    if "rhs" not in fields:
        raise CatalogError("record has no rhs", record, first_line)

    def field(key: str, convert: Callable[[str], Any]) -> Any:
        if key not in fields:
            return None
        lineno, value = fields[key]
        try:
            return convert(value)
        except (ParseError, ValidationError, ValueError) as exc:
            raise CatalogError(f"{key}: {exc}", record, lineno) from exc

    rhs = field("rhs", parse)
    lhs = field("lhs", parse_constant_expr)
    series = field("series", parse_series)
    radical = field("radical", Radical) or Radical.ONE
    printed = field("printed", parse)

    if series is not None:
        kind = EntryKind.EXPANSION
    elif lhs is None:
        raise CatalogError("formula records need an lhs", record, first_line)
    elif lhs.is_zero():
        kind = EntryKind.ZERO_RELATION
    else:
        kind = EntryKind.FORMULA

    try:
        return CatalogEntry(
            name=record,
            lhs=lhs,
            rhs=rhs,
            citation=fields.get("cite", (0, ""))[1],
            kind=kind,
            series=series,
            radical=radical,
            printed=printed,
            note=fields["note"][1] if "note" in fields else None,
        )
    except ValidationError as exc:
        raise CatalogError(str(exc), record, first_line) from exc


def parse_catalog(text: str) -> list[CatalogEntry]:
    entries: list[CatalogEntry] = []
    seen: dict[str, int] = {}
    for lines in _split_records(text):
        entry = _build_entry(lines)
        if entry.name in seen:
            raise CatalogError(
                f"duplicate entry name (first defined at line {seen[entry.name]})",
                entry.name,
                lines[0][0],
            )
        seen[entry.name] = lines[0][0]
        entries.append(entry)
    return entries


def load_catalog(path: Path | str | None = None) -> list[CatalogEntry]:
    """Load a catalog file; the shipped catalog when no path is given."""
    path = Path(path) if path is not None else default_catalog_path()
    entries = parse_catalog(path.read_text(encoding="utf-8"))
    logger.info("Loaded %d catalog entries from %s", len(entries), path)
    return entries


def format_entry(entry: CatalogEntry) -> str:
    lines = [f"name = {entry.name}"]
    if entry.citation:
        lines.append(f"cite = {entry.citation}")
    if entry.lhs is not None:
        lines.append(f"lhs = {format_constant_expr(entry.lhs)}")
    if entry.series is not None:
        lines.append(f"series = {format_series(entry.series)}")
    if entry.radical is not Radical.ONE:
        lines.append(f"radical = {entry.radical.value}")
    lines.append(f"rhs = {print_formula(entry.rhs)}")
    if entry.printed is not None:
        lines.append(f"printed = {print_formula(entry.printed)}")
    if entry.note:
        lines.append(f"note = {entry.note}")
    return "\n".join(lines)


def format_catalog(entries: Iterable[CatalogEntry]) -> str:
    return "\n\n".join(format_entry(e) for e in entries) + "\n"


def save_catalog(entries: Iterable[CatalogEntry], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_catalog(entries), encoding="utf-8")
    logger.info("Wrote catalog to %s", path)
    return path


def get_entry(entries: Iterable[CatalogEntry], name: str) -> CatalogEntry:
    """Look an entry up by name; the error lists what is available."""
    entries = list(entries)
    for entry in entries:
        if entry.name == name:
            return entry
    available = ", ".join(e.name for e in entries)
    raise CatalogError(f"unknown entry; available: {available}", name)


def entries_of_kind(entries: Iterable[CatalogEntry], kind: EntryKind) -> list[CatalogEntry]:
    return [e for e in entries if e.kind is kind]
