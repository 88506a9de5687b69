"""Correlation screening and validation statistics.

Pearson and first-order partial correlations with two-tailed Student-t
significance, area exclusion for subset analyses, and the equal-width
histogram used for the score distribution plot.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.special import betainc

from riskindex.errors import AreaLookupError, CollinearityError, CoverageError, DegenerateError, ShapeError
from riskindex.model import CorrelationKind, CorrelationReport

MIN_AREAS = 4
# |r| this close to 1 is treated as exactly 1 (rounding noise on identical data)
_SATURATION_EPS = 8 * np.finfo(float).eps


def _vector(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ShapeError("expected a 1-d vector")
    return arr


def pearson(x, y) -> float:
    """Sample Pearson product-moment correlation."""
    x, y = _vector(x), _vector(y)
    if x.shape != y.shape:
        raise ShapeError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 3:
        raise ShapeError(f"need at least 3 observations (got {x.size})")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = np.sum(dx * dx)
    syy = np.sum(dy * dy)
    if sxx == 0 or syy == 0:
        raise DegenerateError("correlation undefined for a constant variable")
    r = float(np.sum(dx * dy) / (math.sqrt(sxx) * math.sqrt(syy)))
    if abs(r) > 1 - _SATURATION_EPS:
        r = math.copysign(1.0, r)
    return r


@dataclass(frozen=True)
class Significance:
    t: float
    p: float
    df: int
    saturated: bool = False

    @property
    def stars(self) -> str:
        return significance_stars(self.p)


def significance_stars(p: float) -> str:
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def significance(r: float, n: int, controls: int = 0) -> Significance:
    """Two-tailed t test of a (partial) correlation coefficient.

    ``df = n - 2 - controls``. A coefficient of exactly +/-1 is reported as
    ``p = 0`` with ``saturated`` set instead of dividing by zero.
    """
    df = n - 2 - controls
    if df < 1:
        raise ShapeError(f"degrees of freedom {df} < 1 (n={n}, controls={controls})")
    if not -1.0 <= r <= 1.0:
        raise ValueError(f"correlation {r} outside [-1, 1]")
    if abs(r) == 1.0:
        return Significance(math.copysign(math.inf, r), 0.0, df, saturated=True)
    t = r * math.sqrt(df / (1.0 - r * r))
    # P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return Significance(t, min(max(p, 0.0), 1.0), df)


def _partial_from_r(rxy: float, rxz: float, ryz: float) -> float:
    if abs(rxz) == 1.0 or abs(ryz) == 1.0:
        raise CollinearityError("control variable is perfectly correlated with a variable of interest")
    r = (rxy - rxz * ryz) / math.sqrt((1.0 - rxz * rxz) * (1.0 - ryz * ryz))
    if abs(r) > 1 - _SATURATION_EPS:
        r = math.copysign(1.0, r)
    return r


def partial_correlation(x, y, z) -> float:
    """Correlation of x and y with the linear effect of z removed."""
    x, y, z = _vector(x), _vector(y), _vector(z)
    if not x.size == y.size == z.size:
        raise ShapeError("partial correlation needs equal-length vectors")
    if x.size < MIN_AREAS:
        raise ShapeError(f"need at least {MIN_AREAS} observations (got {x.size})")
    return _partial_from_r(pearson(x, y), pearson(x, z), pearson(y, z))


@dataclass(frozen=True)
class VariableSet:
    """Named variables aligned on a common, ordered set of area codes.

    ``data`` has one row per variable and one column per area.
    """

    areas: tuple[str, ...]
    names: tuple[str, ...]
    data: np.ndarray
    excluded: tuple[str, ...] = ()

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "areas", tuple(self.areas))
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "excluded", tuple(self.excluded))
        if data.shape != (len(self.names), len(self.areas)):
            raise ShapeError(f"data shape {data.shape} does not match {len(self.names)} names x {len(self.areas)} areas")
        if len(self.areas) < MIN_AREAS:
            raise ShapeError(f"need at least {MIN_AREAS} areas (got {len(self.areas)})")
        if len(set(self.names)) != len(self.names):
            raise ShapeError("variable names must be unique")

    @classmethod
    def from_columns(cls, columns: Mapping[str, Mapping[str, float]]) -> "VariableSet":
        """Align ``{variable: {area_code: value}}`` by area code."""
        names = list(columns)
        if not names:
            raise ShapeError("no variables supplied")
        codes = sorted(set().union(*(c.keys() for c in columns.values())))
        holes = [(code, name) for name in names for code in codes if code not in columns[name]]
        if holes:
            listing = ", ".join(f"({c}, {v})" for c, v in holes[:20])
            raise CoverageError(f"variables are not aligned; missing: {listing}", holes)
        data = [[float(columns[name][code]) for code in codes] for name in names]
        return cls(tuple(codes), tuple(names), np.array(data))

    @property
    def n(self) -> int:
        return len(self.areas)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[self.names.index(name)]


def exclude_areas(variables: VariableSet, exclusions: Sequence[str]) -> VariableSet:
    """Drop the listed areas from every variable."""
    unknown = sorted(set(exclusions) - set(variables.areas))
    if unknown:
        raise AreaLookupError(f"exclusion codes not in variable set: {', '.join(unknown)}")
    drop = set(exclusions)
    keep = [i for i, code in enumerate(variables.areas) if code not in drop]
    return VariableSet(
        areas=tuple(variables.areas[i] for i in keep),
        names=variables.names,
        data=variables.data[:, keep],
        excluded=tuple(variables.excluded) + tuple(sorted(drop)),
    )


def _pearson_cells(variables: VariableSet) -> np.ndarray:
    k = len(variables.names)
    r = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            r[i, j] = r[j, i] = pearson(variables.data[i], variables.data[j])
    return r


def _report(names, r, n, controls, kind, control, excluded) -> CorrelationReport:
    k = len(names)
    t = np.zeros((k, k))
    p = np.zeros((k, k))
    saturated = np.zeros((k, k), dtype=bool)
    df = n - 2 - controls
    for i in range(k):
        for j in range(k):
            if i == j:
                t[i, j], p[i, j], saturated[i, j] = math.inf, 0.0, True
            elif j < i:
                t[i, j], p[i, j], saturated[i, j] = t[j, i], p[j, i], saturated[j, i]
            else:
                s = significance(float(r[i, j]), n, controls)
                t[i, j], p[i, j], saturated[i, j] = s.t, s.p, s.saturated
    return CorrelationReport(
        variable_names=names,
        r=r,
        t=t,
        p_two_tailed=p,
        saturated=saturated,
        n=n,
        df=df,
        kind=kind,
        control=control,
        excluded_areas=excluded,
    )


def correlation_matrix(variables: VariableSet) -> CorrelationReport:
    """Pearson matrix over every pair of variables (each pair computed once)."""
    r = _pearson_cells(variables)
    return _report(variables.names, r, variables.n, 0, CorrelationKind.PEARSON, None, variables.excluded)


def partial_correlation_matrix(variables: VariableSet, control: str) -> CorrelationReport:
    """First-order partial correlations controlling for ``control``.

    The control variable itself is dropped from the report.
    """
    if control not in variables.names:
        raise AreaLookupError(f"unknown control variable {control!r}")
    full = _pearson_cells(variables)
    c = variables.names.index(control)
    keep = [i for i in range(len(variables.names)) if i != c]
    r = np.eye(len(keep))
    for a, i in enumerate(keep):
        for b in range(a + 1, len(keep)):
            j = keep[b]
            r[a, b] = r[b, a] = _partial_from_r(full[i, j], full[i, c], full[j, c])
    names = tuple(variables.names[i] for i in keep)
    return _report(names, r, variables.n, 1, CorrelationKind.PARTIAL, control, variables.excluded)


def histogram(values, bin_count: int) -> list[tuple[float, float, int]]:
    """Equal-width bins over [min, max]; bins are half-open except the last."""
    values = _vector(values)
    if values.size == 0:
        raise ShapeError("histogram of an empty vector")
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    lo, hi = float(values.min()), float(values.max())
    width = (hi - lo) / bin_count
    edges = [lo + i * width for i in range(bin_count)] + [hi]
    counts = [0] * bin_count
    for v in values.tolist():
        k = bisect.bisect_right(edges, v) - 1
        counts[min(max(k, 0), bin_count - 1)] += 1
    return [(edges[i], edges[i + 1], counts[i]) for i in range(bin_count)]


def _fmt_r(r: float) -> str:
    text = f"{r:.3f}"
    return text.replace("0.", ".", 1) if text.startswith(("0.", "-0.")) else text


def format_report(report: CorrelationReport, title: str = "") -> str:
    """Lower-triangle text table with significance stars."""
    names = report.variable_names
    k = len(names)
    head = ["Measure"] + [f"({i + 1})" for i in range(k)]
    rows = []
    for i, name in enumerate(names):
        cells = [f"({i + 1}) {name}"]
        for j in range(k):
            if j == i:
                cells.append("1")
            elif j > i:
                cells.append("-")
            else:
                cells.append(_fmt_r(report.r[i, j]) + significance_stars(report.p_two_tailed[i, j]))
        rows.append(cells)
    widths = [max(len(r[c]) for r in rows + [head]) for c in range(k + 1)]
    lines = []
    if title:
        lines.append(title)
    lines.append("  ".join(h.ljust(w) for h, w in zip(head, widths)).rstrip())
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    notes = [f"n={report.n}", f"df={report.df}"]
    if report.control:
        notes.append(f"controlling for {report.control}")
    if report.excluded_areas:
        notes.append(f"{len(report.excluded_areas)} areas excluded")
    lines.append("(*) Significant at the 0.05 level (**) Significant at the 0.01 level (" + ", ".join(notes) + ")")
    return "\n".join(lines) + "\n"


def report_csv(report: CorrelationReport) -> str:
    """One row per unordered pair: variable_a, variable_b, r, t, p, df, stars."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["variable_a", "variable_b", "r", "t", "p", "df", "stars"])
    names = report.variable_names
    for i in range(len(names)):
        for j in range(i):
            p = float(report.p_two_tailed[i, j])
            writer.writerow([
                names[i],
                names[j],
                repr(float(report.r[i, j])),
                repr(float(report.t[i, j])),
                repr(p),
                report.df,
                significance_stars(p),
            ])
    return buf.getvalue()
