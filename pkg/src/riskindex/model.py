"""Core domain types shared by ingest, stats, correlate, render and the CLI."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from riskindex.errors import ConfigError, DuplicateError, ShapeError

WEIGHT_SUM_TOLERANCE = 0.01


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _check_unique(codes: Sequence[str], context: str) -> None:
    seen = set()
    dupes = []
    for code in codes:
        if code in seen:
            dupes.append(code)
        seen.add(code)
    if dupes:
        raise DuplicateError(dupes, context)


@dataclass(frozen=True)
class AreaId:
    code: str
    name: str = ""

    def __post_init__(self):
        if not self.code:
            raise ValueError("area code must be non-empty")
        if not self.name:
            object.__setattr__(self, "name", self.code)


class Polarity(enum.Enum):
    RISK_INCREASING = "risk_increasing"
    RISK_DECREASING = "risk_decreasing"


@dataclass(frozen=True)
class IndicatorSpec:
    id: str
    label: str
    polarity: Polarity = Polarity.RISK_INCREASING
    weight_percent: float = 1.0
    source_note: str = ""

    @property
    def reversed(self) -> bool:
        return self.polarity is Polarity.RISK_DECREASING

    @property
    def display_label(self) -> str:
        """Label as it reads after polarity correction."""
        return f"NOT {self.label}" if self.reversed else self.label

    @classmethod
    def from_dict(cls, d: Mapping) -> "IndicatorSpec":
        try:
            polarity = Polarity(d.get("polarity", Polarity.RISK_INCREASING.value))
        except ValueError as exc:
            raise ConfigError(f"indicator {d.get('id')!r}: bad polarity {d.get('polarity')!r}") from exc
        try:
            return cls(
                id=str(d["id"]),
                label=str(d.get("label", d["id"])),
                polarity=polarity,
                weight_percent=float(d["weight_percent"]),
                source_note=str(d.get("source_note", "")),
            )
        except KeyError as exc:
            raise ConfigError(f"indicator entry missing field {exc.args[0]!r}") from exc

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "polarity": self.polarity.value,
            "weight_percent": self.weight_percent,
            "source_note": self.source_note,
        }


@dataclass(frozen=True)
class IndexConfig:
    name: str
    indicators: tuple[IndicatorSpec, ...]
    display_decimals: int = 4

    def __post_init__(self):
        object.__setattr__(self, "indicators", tuple(self.indicators))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(spec.id for spec in self.indicators)

    def spec(self, indicator_id: str) -> IndicatorSpec:
        for spec in self.indicators:
            if spec.id == indicator_id:
                return spec
        raise KeyError(indicator_id)

    @classmethod
    def from_dict(cls, d: Mapping) -> "IndexConfig":
        if "indicators" not in d:
            raise ConfigError("index config has no 'indicators' list")
        return cls(
            name=str(d.get("name", "index")),
            indicators=tuple(IndicatorSpec.from_dict(x) for x in d["indicators"]),
            display_decimals=int(d.get("display_decimals", 4)),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "display_decimals": self.display_decimals,
            "indicators": [s.to_dict() for s in self.indicators],
        }


def validate_config(config: IndexConfig) -> list[str]:
    """Return a message for every violated invariant; empty means valid."""
    problems = []
    if len(config.indicators) < 2:
        problems.append("at least 2 indicators required")
    seen = set()
    for spec in config.indicators:
        if spec.id in seen:
            problems.append(f"duplicate indicator id {spec.id!r}")
        seen.add(spec.id)
        if not (spec.weight_percent > 0) or not math.isfinite(spec.weight_percent):
            problems.append(f"indicator {spec.id!r} weight must be > 0 (got {spec.weight_percent:g})")
    total = math.fsum(spec.weight_percent for spec in config.indicators)
    if abs(total - 100.0) > WEIGHT_SUM_TOLERANCE:
        problems.append(f"weights sum to {total:g}")
    if config.display_decimals < 0:
        problems.append("display_decimals must be >= 0")
    return problems


def normalized_weights(config: IndexConfig) -> dict[str, float]:
    problems = validate_config(config)
    if problems:
        raise ConfigError("invalid index config: " + "; ".join(problems))
    total = math.fsum(spec.weight_percent for spec in config.indicators)
    return {spec.id: spec.weight_percent / total for spec in config.indicators}


@dataclass(frozen=True)
class IndicatorTable:
    """Area x indicator matrix of raw rates, in config indicator order."""

    areas: tuple[AreaId, ...]
    indicators: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "areas", tuple(self.areas))
        object.__setattr__(self, "indicators", tuple(self.indicators))
        values = _frozen(self.values)
        if values.shape != (len(self.areas), len(self.indicators)):
            raise ShapeError(
                f"values shape {values.shape} != ({len(self.areas)}, {len(self.indicators)})"
            )
        if not np.all(np.isfinite(values)):
            raise ShapeError("indicator table contains non-finite values")
        _check_unique([a.code for a in self.areas], "indicator table")
        object.__setattr__(self, "values", values)

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(a.code for a in self.areas)

    def column(self, indicator_id: str) -> np.ndarray:
        return self.values[:, self.indicators.index(indicator_id)]


@dataclass(frozen=True)
class IndexResult:
    config_name: str
    areas: tuple[AreaId, ...]
    normalized: "object"  # stats.NormalizedTable; typed loosely to avoid the import cycle
    unweighted_score: np.ndarray
    weighted_score: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "unweighted_score", _frozen(self.unweighted_score))
        object.__setattr__(self, "weighted_score", _frozen(self.weighted_score))

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(a.code for a in self.areas)

    def weighted(self) -> dict[str, float]:
        return dict(zip(self.codes, map(float, self.weighted_score)))

    def unweighted(self) -> dict[str, float]:
        return dict(zip(self.codes, map(float, self.unweighted_score)))


class CorrelationKind(enum.Enum):
    PEARSON = "pearson"
    PARTIAL = "partial"


@dataclass(frozen=True)
class CorrelationReport:
    """Correlation matrix with per-cell significance.

    ``control`` is set (and ``kind`` is PARTIAL) when every cell is a
    first-order partial correlation controlling for that variable.
    """

    variable_names: tuple[str, ...]
    r: np.ndarray
    t: np.ndarray
    p_two_tailed: np.ndarray
    saturated: np.ndarray
    n: int
    df: int
    kind: CorrelationKind = CorrelationKind.PEARSON
    control: str | None = None
    excluded_areas: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "variable_names", tuple(self.variable_names))
        object.__setattr__(self, "excluded_areas", tuple(self.excluded_areas))
        for name in ("r", "t", "p_two_tailed"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, "saturated", _frozen(self.saturated, dtype=bool))
        if self.df < 1:
            raise ShapeError(f"degrees of freedom must be >= 1 (got {self.df})")

    def cell(self, a: str, b: str) -> float:
        i, j = self.variable_names.index(a), self.variable_names.index(b)
        return float(self.r[i, j])


@dataclass(frozen=True)
class ClassifiedLayer:
    """Class assignment per area plus the interior class boundaries.

    ``breaks`` holds the ``class_count - 1`` cut points; class ``i`` covers
    ``[breaks[i-1], breaks[i])`` with the two outer classes unbounded.
    """

    breaks: tuple[float, ...]
    labels: tuple[str, ...]
    assignment: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "breaks", tuple(float(b) for b in self.breaks))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "assignment", dict(self.assignment))
        if any(b >= c for b, c in zip(self.breaks, self.breaks[1:])):
            raise ValueError("breaks must be strictly increasing")
        if len(self.labels) != len(self.breaks) + 1:
            raise ValueError("need exactly one label per class")
        for code, k in self.assignment.items():
            if not 0 <= k < self.class_count:
                raise ValueError(f"class index {k} out of range for {code}")

    @property
    def class_count(self) -> int:
        return len(self.labels)
