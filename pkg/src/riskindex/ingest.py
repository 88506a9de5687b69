"""Loading and harmonising raw indicator data.

Everything here fails fast: a hole, duplicate or unparseable cell raises with
enough context to find it in the source file. Nothing is imputed.
"""

from __future__ import annotations

import csv
import enum
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from riskindex.errors import (
    CoverageError,
    DataError,
    DuplicateError,
    MappingError,
    ParseError,
    SchemaError,
)
from riskindex.model import AreaId, IndexConfig, IndicatorTable

Record = tuple[AreaId, float]


class BoundaryMode(enum.Enum):
    ACCRETION = "accretion"
    # Minor border changes are handled as straight renames.
    MINOR_CHANGE = "minor_change"


class MergeKind(enum.Enum):
    COUNT = "count"
    RATE = "rate"


@dataclass(frozen=True)
class PopulationTable:
    counts: Mapping[str, float]

    def __post_init__(self):
        bad = sorted(code for code, n in self.counts.items() if not (n > 0 and math.isfinite(n)))
        if bad:
            raise DataError(f"population must be > 0 for every area; offending: {', '.join(bad)}")
        object.__setattr__(self, "counts", dict(self.counts))

    def __getitem__(self, code: str) -> float:
        return self.counts[code]

    def __contains__(self, code) -> bool:
        return code in self.counts


@dataclass(frozen=True)
class BoundaryMapping:
    """Old area code -> new area code, with a mode per new area."""

    entries: Mapping[str, str]
    modes: Mapping[str, BoundaryMode] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(self.entries))
        modes = {new: BoundaryMode.ACCRETION for new in self.entries.values()}
        modes.update(self.modes)
        object.__setattr__(self, "modes", modes)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[str, str]], modes=None) -> "BoundaryMapping":
        entries: dict[str, str] = {}
        for old, new in pairs:
            if old in entries and entries[old] != new:
                raise MappingError(f"old area {old} maps to both {entries[old]} and {new}")
            entries[old] = new
        return cls(entries, modes or {})

    @classmethod
    def identity(cls, codes) -> "BoundaryMapping":
        return cls({c: c for c in codes})


def _read_rows(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, header row expected")
        header = [h.strip() for h in reader.fieldnames]
        reader.fieldnames = header
        # line 1 is the header, so the first data row is line 2
        rows = [(i, row) for i, row in enumerate(reader, start=2)]
    return header, rows


def _parse_float(text, path, row, column) -> float:
    try:
        value = float(text.strip())
    except (AttributeError, ValueError):
        raise ParseError(f"column {column!r}: cannot parse {text!r} as a number", path, row) from None
    if not math.isfinite(value):
        raise ParseError(f"column {column!r}: non-finite value {text!r}", path, row)
    return value


def load_indicator_csv(path, area_column: str, value_column: str, name_column: str | None = None) -> list[Record]:
    """Read ``(AreaId, value)`` pairs from a headed CSV file.

    Row numbers in errors are file line numbers, so the header is row 1.
    """
    header, rows = _read_rows(path)
    for column in (area_column, value_column, name_column):
        if column is not None and column not in header:
            raise SchemaError(f"{path}: missing column {column!r} (have {', '.join(header)})")
    records = []
    seen: set[str] = set()
    dupes = []
    for lineno, row in rows:
        code = (row[area_column] or "").strip()
        if not code:
            raise ParseError(f"empty area code in column {area_column!r}", path, lineno)
        value = _parse_float(row[value_column], path, lineno, value_column)
        if code in seen:
            dupes.append(code)
        seen.add(code)
        name = (row[name_column] or "").strip() if name_column else ""
        records.append((AreaId(code, name), value))
    if dupes:
        raise DuplicateError(dupes, str(path))
    return records


def load_population_csv(path, area_column="code", value_column="population") -> PopulationTable:
    return PopulationTable({a.code: v for a, v in load_indicator_csv(path, area_column, value_column)})


def load_boundary_mapping(path) -> BoundaryMapping:
    header, rows = _read_rows(path)
    for column in ("old_code", "new_code"):
        if column not in header:
            raise SchemaError(f"{path}: missing column {column!r}")
    pairs = []
    modes = {}
    for lineno, row in rows:
        old, new = row["old_code"].strip(), row["new_code"].strip()
        if not old or not new:
            raise ParseError("empty code in boundary mapping", path, lineno)
        pairs.append((old, new))
        if "mode" in header and (row.get("mode") or "").strip():
            try:
                modes[new] = BoundaryMode(row["mode"].strip())
            except ValueError:
                raise ParseError(f"unknown boundary mode {row['mode']!r}", path, lineno) from None
    return BoundaryMapping.from_pairs(pairs, modes)


def _code(area) -> str:
    return area.code if isinstance(area, AreaId) else str(area)


def counts_to_rates(counts: Mapping, population: PopulationTable, scale: float = 100.0) -> dict[str, float]:
    """``rate = scale * count / population`` per area (scale 100 gives percent)."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    counts = {_code(k): v for k, v in counts.items()}
    missing = sorted(code for code in counts if code not in population)
    if missing:
        raise CoverageError(f"no population for areas: {', '.join(missing)}", missing)
    return {code: scale * count / population[code] for code, count in counts.items()}


def merge_by_boundary(
    records: Sequence[Record] | Mapping,
    mapping: BoundaryMapping,
    population: PopulationTable | None = None,
    kind: MergeKind = MergeKind.COUNT,
) -> list[Record]:
    """Re-express old-boundary values on new boundaries.

    Counts are summed; rates become the population-weighted mean of the
    constituent rates, which equals converting the pooled counts.
    """
    if isinstance(records, Mapping):
        records = list(records.items())
    pairs = [(_code(a), float(v)) for a, v in records]
    unmapped = sorted(code for code, _ in pairs if code not in mapping.entries)
    if unmapped:
        raise MappingError(f"areas not in boundary mapping: {', '.join(unmapped)}")
    if kind is MergeKind.RATE:
        if population is None:
            raise CoverageError("rate merge needs a population table")
        missing = sorted(code for code, _ in pairs if code not in population)
        if missing:
            raise CoverageError(f"no population for areas: {', '.join(missing)}", missing)

    groups: dict[str, list[tuple[str, float]]] = {}
    for code, value in pairs:
        groups.setdefault(mapping.entries[code], []).append((code, value))

    out = []
    for new, members in groups.items():
        if kind is MergeKind.COUNT:
            value = math.fsum(v for _, v in members)
        else:
            pops = [population[c] for c, _ in members]
            value = math.fsum(v * p for (_, v), p in zip(members, pops)) / math.fsum(pops)
            lo = min(v for _, v in members)
            hi = max(v for _, v in members)
            value = min(max(value, lo), hi)
        out.append((AreaId(new), value))
    return out


def assemble_table(
    columns: Mapping[str, Mapping],
    config: IndexConfig,
    names: Mapping[str, str] | None = None,
) -> IndicatorTable:
    """Stack per-indicator columns into a table in config order.

    Areas are sorted by code. Any (area, indicator) hole is an error.
    """
    wanted = list(config.ids)
    extra = sorted(set(columns) - set(wanted))
    if extra:
        raise SchemaError(f"columns not in config: {', '.join(extra)}")
    absent = [i for i in wanted if i not in columns]
    if absent:
        raise SchemaError(f"config indicators without data: {', '.join(absent)}")

    cols = {ind: {_code(k): float(v) for k, v in columns[ind].items()} for ind in wanted}
    codes = sorted(set().union(*(c.keys() for c in cols.values())))
    holes = [(code, ind) for code in codes for ind in wanted if code not in cols[ind]]
    if holes:
        listing = ", ".join(f"({c}, {i})" for c, i in holes)
        raise CoverageError(f"missing indicator values: {listing}", holes)

    names = names or {}
    values = np.array([[cols[ind][code] for ind in wanted] for code in codes], dtype=float)
    return IndicatorTable(tuple(AreaId(c, names.get(c, "")) for c in codes), tuple(wanted), values)
