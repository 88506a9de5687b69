"""Index arithmetic: min-max normalisation, polarity, aggregation and ranking."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping

import numpy as np

from riskindex.errors import AreaLookupError, DegenerateError, SchemaError, ShapeError
from riskindex.model import AreaId, IndexConfig, IndexResult, IndicatorTable, normalized_weights


@dataclass(frozen=True)
class NormalizedTable:
    """Min-max rescaled indicator table.

    ``bounds`` keeps the raw ``(min, max)`` of each column for auditing and
    ``reversed`` flags the columns that have been turned into ``1 - x``.
    """

    areas: tuple[AreaId, ...]
    indicators: tuple[str, ...]
    values: np.ndarray
    bounds: tuple[tuple[float, float], ...]
    reversed: tuple[bool, ...]

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.shape != (len(self.areas), len(self.indicators)):
            raise ShapeError(f"values shape {values.shape} does not match labels")

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(a.code for a in self.areas)

    def row(self, code: str) -> np.ndarray:
        try:
            return self.values[self.codes.index(code)]
        except ValueError:
            raise AreaLookupError(f"unknown area {code!r}") from None


def min_max_normalize(table: IndicatorTable) -> NormalizedTable:
    """Rescale each column to [0, 1] via ``(x - min) / (max - min)``."""
    values = table.values
    lo = values.min(axis=0)
    hi = values.max(axis=0)
    flat = [ind for ind, a, b in zip(table.indicators, lo, hi) if not b > a]
    if flat:
        raise DegenerateError(f"constant indicator column(s), cannot normalise: {', '.join(flat)}")
    norm = (values - lo) / (hi - lo)
    return NormalizedTable(
        areas=table.areas,
        indicators=table.indicators,
        values=norm,
        bounds=tuple((float(a), float(b)) for a, b in zip(lo, hi)),
        reversed=(False,) * len(table.indicators),
    )


def _check_columns(norm: NormalizedTable, config: IndexConfig) -> None:
    if tuple(norm.indicators) != config.ids:
        raise SchemaError(
            f"table columns {list(norm.indicators)} do not match config indicators {list(config.ids)}"
        )


def apply_polarity(norm: NormalizedTable, config: IndexConfig) -> NormalizedTable:
    """Replace every risk-decreasing column by ``1 - value``."""
    _check_columns(norm, config)
    flip = np.array([spec.reversed for spec in config.indicators])
    values = np.where(flip, 1.0 - norm.values, norm.values)
    return NormalizedTable(
        areas=norm.areas,
        indicators=norm.indicators,
        values=values,
        bounds=norm.bounds,
        reversed=tuple(r != f for r, f in zip(norm.reversed, flip.tolist())),
    )


def _row_dot(values: np.ndarray, weights) -> np.ndarray:
    # column-by-column accumulation keeps summation order fixed
    acc = np.zeros(values.shape[0])
    for j, w in enumerate(weights):
        acc = acc + values[:, j] * w
    return acc


def _unweighted(norm: NormalizedTable) -> np.ndarray:
    k = len(norm.indicators)
    if k == 0:
        raise ShapeError("table has no indicator columns")
    return np.clip(_row_dot(norm.values, [1.0] * k) / k, 0.0, 1.0)


def _weighted(norm: NormalizedTable, config: IndexConfig) -> np.ndarray:
    _check_columns(norm, config)
    weights = normalized_weights(config)
    # weights may sum to 1 +/- an ulp; scores stay in [0, 1]
    return np.clip(_row_dot(norm.values, [weights[i] for i in config.ids]), 0.0, 1.0)


def unweighted_index(norm: NormalizedTable) -> dict[str, float]:
    """Mean of each area's normalised row."""
    return dict(zip(norm.codes, map(float, _unweighted(norm))))


def weighted_index(norm: NormalizedTable, config: IndexConfig) -> dict[str, float]:
    """Weighted sum of each area's normalised row, weights as fractions of 1."""
    return dict(zip(norm.codes, map(float, _weighted(norm, config))))


def build_index(table: IndicatorTable, config: IndexConfig) -> IndexResult:
    """Normalise, correct polarity and score every area."""
    if tuple(table.indicators) != config.ids:
        raise SchemaError("indicator table columns do not follow the config order")
    norm = apply_polarity(min_max_normalize(table), config)
    return IndexResult(
        config_name=config.name,
        areas=table.areas,
        normalized=norm,
        unweighted_score=_unweighted(norm),
        weighted_score=_weighted(norm, config),
    )


class Direction(enum.Enum):
    DESCENDING = "descending"
    ASCENDING = "ascending"


def rank_areas(scores: Mapping[str, float], direction: Direction = Direction.DESCENDING) -> list[tuple[int, str, float]]:
    """Dense ranking; tied scores share a rank and are listed by area code."""
    sign = -1.0 if direction is Direction.DESCENDING else 1.0
    ordered = sorted(scores.items(), key=lambda kv: (sign * kv[1], kv[0]))
    out = []
    rank = 0
    previous = None
    for code, score in ordered:
        if previous is None or score != previous:
            rank += 1
            previous = score
        out.append((rank, code, score))
    return out


def contribution_breakdown(norm: NormalizedTable, config: IndexConfig, area: str) -> list[tuple[str, float]]:
    """Per-indicator weighted contributions for one area, in config order."""
    _check_columns(norm, config)
    row = norm.row(area.code if isinstance(area, AreaId) else area)
    weights = normalized_weights(config)
    labels = [
        f"NOT {spec.label}" if rev else spec.label for spec, rev in zip(config.indicators, norm.reversed)
    ]
    return [(label, float(v * weights[i])) for label, v, i in zip(labels, row, config.ids)]


def format_score(value: float, decimals: int = 4) -> str:
    """Round half-up for display (``0.73`` -> ``'0.7300'``)."""
    quantum = Decimal(1).scaleb(-decimals)
    return str(Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP))
