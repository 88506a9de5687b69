"""Run configuration and the build/correlate/render pipeline steps.

A run config is a single JSON document. Relative paths inside it resolve
against the directory containing the config file. See README for the schema.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from riskindex import correlate as corr
from riskindex.errors import ConfigError
from riskindex.fileio import atomic_write_text
from riskindex.ingest import (
    MergeKind,
    assemble_table,
    counts_to_rates,
    load_boundary_mapping,
    load_indicator_csv,
    load_population_csv,
    merge_by_boundary,
)
from riskindex.model import IndexConfig, IndexResult, IndicatorTable, normalized_weights, validate_config
from riskindex.render import (
    choropleth_svg,
    default_palette,
    histogram_svg,
    inject_geojson_properties,
    load_geojson,
    radar_svg,
    sd_classify,
)
from riskindex.stats import Direction, build_index, contribution_breakdown, format_score, rank_areas

OUTPUT_DIR_ENV = "RISKINDEX_OUTPUT_DIR"


@dataclass(frozen=True)
class CsvRef:
    path: Path
    area_column: str = "code"
    value_column: str = "value"


@dataclass(frozen=True)
class InputSpec:
    source: CsvRef
    mapping_path: Path | None = None
    mapping_population: Path | None = None
    population: Path | None = None
    scale: float = 100.0

    @property
    def is_count(self) -> bool:
        return self.population is not None


@dataclass(frozen=True)
class MeasureSpec:
    id: str
    label: str
    source: CsvRef


@dataclass(frozen=True)
class RenderSpec:
    geometry: Path | None = None
    key_property: str = "code"
    palette: tuple[str, ...] | None = None
    class_count: int = 6


@dataclass(frozen=True)
class RunConfig:
    path: Path
    index: IndexConfig
    inputs: Mapping[str, InputSpec]
    areas: CsvRef | None = None
    area_name_column: str | None = None
    validation: tuple[MeasureSpec, ...] = ()
    exclusions: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    render: RenderSpec = RenderSpec()
    output_dir: Path = Path("output")

    def referenced_files(self) -> list[Path]:
        files = []
        if self.areas:
            files.append(self.areas.path)
        for spec in self.inputs.values():
            files += [p for p in (spec.source.path, spec.mapping_path, spec.mapping_population, spec.population) if p]
        files += [m.source.path for m in self.validation]
        if self.render.geometry:
            files.append(self.render.geometry)
        return files

    def measure(self, measure_id: str) -> MeasureSpec:
        for m in self.validation:
            if m.id == measure_id:
                return m
        raise ConfigError(f"unknown validation measure {measure_id!r} (defined: {', '.join(m.id for m in self.validation)})")


def _csv_ref(d: Mapping, base: Path, what: str) -> CsvRef:
    if not isinstance(d, Mapping) or "path" not in d:
        raise ConfigError(f"{what}: expected an object with a 'path'")
    return CsvRef(base / d["path"], d.get("area_column", "code"), d.get("value_column", "value"))


def _parse(raw: Mapping[str, Any], path: Path) -> RunConfig:
    base = path.parent
    if "index" not in raw:
        raise ConfigError(f"{path}: missing 'index' section")
    index = IndexConfig.from_dict(raw["index"])
    problems = validate_config(index)
    if problems:
        raise ConfigError(f"{path}: invalid index config: " + "; ".join(problems))

    raw_inputs = raw.get("inputs", {})
    if set(raw_inputs) != set(index.ids):
        missing = sorted(set(index.ids) - set(raw_inputs))
        extra = sorted(set(raw_inputs) - set(index.ids))
        raise ConfigError(f"{path}: inputs do not match indicators (missing {missing}, extra {extra})")
    inputs = {}
    for ind in index.ids:
        d = raw_inputs[ind]
        mapping = d.get("boundary_mapping")
        convert = d.get("convert")
        inputs[ind] = InputSpec(
            source=_csv_ref(d, base, f"input {ind}"),
            mapping_path=base / mapping["path"] if mapping else None,
            mapping_population=base / mapping["population"] if mapping and mapping.get("population") else None,
            population=base / convert["population"] if convert else None,
            scale=float(convert.get("scale", 100.0)) if convert else 100.0,
        )

    areas = None
    name_column = None
    if raw.get("areas"):
        areas = _csv_ref(raw["areas"], base, "areas")
        name_column = raw["areas"].get("name_column")

    validation = tuple(
        MeasureSpec(m["id"], m.get("label", m["id"]), _csv_ref(m, base, f"validation {m.get('id')}"))
        for m in raw.get("validation", [])
    )
    ids = [m.id for m in validation]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"{path}: duplicate validation measure ids")

    exclusions = {}
    for name, codes in raw.get("exclusions", {}).items():
        if isinstance(codes, Mapping):
            ref = _csv_ref(codes, base, f"exclusion {name}")
            codes = _load_codes(ref)
        exclusions[name] = tuple(str(c) for c in codes)

    r = raw.get("render", {})
    render = RenderSpec(
        geometry=base / r["geometry"] if r.get("geometry") else None,
        key_property=r.get("key_property", "code"),
        palette=tuple(r["palette"]) if r.get("palette") else None,
        class_count=int(r.get("class_count", 6)),
    )
    if render.palette is not None and len(render.palette) != render.class_count:
        raise ConfigError(f"{path}: palette has {len(render.palette)} colours for {render.class_count} classes")

    out = os.environ.get(OUTPUT_DIR_ENV) or raw.get("output_dir", "output")
    return RunConfig(
        path=path,
        index=index,
        inputs=inputs,
        areas=areas,
        area_name_column=name_column,
        validation=validation,
        exclusions=exclusions,
        render=render,
        output_dir=base / out,
    )


def _load_codes(ref: CsvRef) -> list[str]:
    if not ref.path.exists():
        raise ConfigError(f"file not found: {ref.path}")
    with ref.path.open(newline="", encoding="utf-8") as fh:
        return [row[ref.area_column].strip() for row in csv.DictReader(fh)]


def load_run_config(path, check_files: bool = True) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, Mapping):
        raise ConfigError(f"{path}: top level must be a JSON object")
    try:
        run = _parse(raw, path)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: bad config entry: {exc}") from None
    if check_files:
        for f in run.referenced_files():
            if not f.exists():
                raise ConfigError(f"file not found: {f}")
    return run


# -- build ---------------------------------------------------------------


def load_area_names(run: RunConfig) -> dict[str, str]:
    if run.areas is None:
        return {}
    names = {}
    with run.areas.path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            code = row[run.areas.area_column].strip()
            names[code] = (row.get(run.area_name_column or "name") or code).strip()
    return names


def load_input(spec: InputSpec) -> dict[str, float]:
    """Read one indicator column, harmonising boundaries and converting counts."""
    records = load_indicator_csv(spec.source.path, spec.source.area_column, spec.source.value_column)
    if spec.mapping_path is not None:
        mapping = load_boundary_mapping(spec.mapping_path)
        if spec.is_count:
            records = merge_by_boundary(records, mapping, kind=MergeKind.COUNT)
        else:
            pop = load_population_csv(spec.mapping_population) if spec.mapping_population else None
            records = merge_by_boundary(records, mapping, pop, kind=MergeKind.RATE)
    values = {a.code: v for a, v in records}
    if spec.is_count:
        values = counts_to_rates(values, load_population_csv(spec.population), spec.scale)
    return values


def load_table(run: RunConfig) -> IndicatorTable:
    columns = {ind: load_input(spec) for ind, spec in run.inputs.items()}
    return assemble_table(columns, run.index, load_area_names(run))


def _csv_text(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def scores_csv(result: IndexResult, decimals: int) -> str:
    weighted = result.weighted()
    ranks = {code: rank for rank, code, _ in rank_areas(weighted, Direction.DESCENDING)}
    rows = [["area_code", "area_name", "unweighted", "weighted", "rank_weighted", "weighted_display"]]
    for area, uw, w in zip(result.areas, result.unweighted_score, result.weighted_score):
        rows.append([area.code, area.name, repr(float(uw)), repr(float(w)), ranks[area.code], format_score(w, decimals)])
    return _csv_text(rows)


def normalized_csv(result: IndexResult) -> str:
    norm = result.normalized
    rows = [["area_code"] + list(norm.indicators)]
    for area, row in zip(norm.areas, norm.values):
        rows.append([area.code] + [repr(float(v)) for v in row])
    return _csv_text(rows)


def audit_json(run: RunConfig, table: IndicatorTable, result: IndexResult) -> str:
    norm = result.normalized
    weights = normalized_weights(run.index)
    doc = {
        "index": run.index.name,
        "areas": len(table.areas),
        "indicators": [
            {
                "id": spec.id,
                "label": f"NOT {spec.label}" if rev else spec.label,
                "reversed": rev,
                "raw_min": lo,
                "raw_max": hi,
                "weight_percent": spec.weight_percent,
                "normalized_weight": weights[spec.id],
            }
            for spec, (lo, hi), rev in zip(run.index.indicators, norm.bounds, norm.reversed)
        ],
        "reversed_columns": [i for i, rev in zip(norm.indicators, norm.reversed) if rev],
    }
    return json.dumps(doc, indent=2) + "\n"


def compute(run: RunConfig) -> tuple[IndicatorTable, IndexResult]:
    table = load_table(run)
    return table, build_index(table, run.index)


def build(run: RunConfig) -> dict[str, Path]:
    table, result = compute(run)
    texts = {
        "scores.csv": scores_csv(result, run.index.display_decimals),
        "normalized.csv": normalized_csv(result),
        "build_audit.json": audit_json(run, table, result),
    }
    # everything is computed before anything is written
    return {name: atomic_write_text(run.output_dir / name, text) for name, text in texts.items()}


# -- correlate -------------------------------------------------------------


def index_labels(run: RunConfig) -> tuple[str, str]:
    return f"{run.index.name} (W)", f"{run.index.name} (Uw)"


def validation_variables(run: RunConfig, result: IndexResult) -> corr.VariableSet:
    w_label, uw_label = index_labels(run)
    columns = {w_label: result.weighted(), uw_label: result.unweighted()}
    for m in run.validation:
        columns[m.label] = {a.code: v for a, v in load_indicator_csv(m.source.path, m.source.area_column, m.source.value_column)}
    return corr.VariableSet.from_columns(columns)


def correlate(run: RunConfig, exclude: list[str] | None = None, control: str | None = None):
    """Pearson (or age-style partial) validation matrix; returns report and file paths."""
    exclude = exclude or []
    unknown = [e for e in exclude if e not in run.exclusions]
    if unknown:
        raise ConfigError(f"unknown exclusion list(s): {', '.join(unknown)} (defined: {', '.join(run.exclusions)})")
    control_label = run.measure(control).label if control else None

    _, result = compute(run)
    variables = validation_variables(run, result)
    codes = sorted({c for e in exclude for c in run.exclusions[e]})
    if codes:
        variables = corr.exclude_areas(variables, codes)
    if control_label:
        report = corr.partial_correlation_matrix(variables, control_label)
    else:
        report = corr.correlation_matrix(variables)

    stem = "partial" if control else "correlation"
    if exclude:
        stem += "_excl-" + "+".join(exclude)
    if control:
        stem += f"_ctrl-{control}"
    title = f"{run.index.name} validation correlations ({'partial, controlling for ' + control_label if control_label else 'Pearson'})"
    text = corr.format_report(report, title)
    paths = {
        f"{stem}.txt": atomic_write_text(run.output_dir / f"{stem}.txt", text),
        f"{stem}.csv": atomic_write_text(run.output_dir / f"{stem}.csv", corr.report_csv(report)),
    }
    return report, text, paths


# -- render ---------------------------------------------------------------


def select_radar_areas(result: IndexResult, spec: list[str]) -> list[str]:
    """``['top', '3']``, ``['bottom', '3']`` or explicit area codes."""
    ranked = [code for _, code, _ in rank_areas(result.weighted(), Direction.DESCENDING)]
    if spec and spec[0] in ("top", "bottom"):
        if len(spec) != 2 or not spec[1].isdigit():
            raise ConfigError(f"radar selection must be 'top N' or 'bottom N', got {' '.join(spec)!r}")
        n = int(spec[1])
        return ranked[:n] if spec[0] == "top" else ranked[::-1][:n]
    codes = [c for token in spec for c in token.split(",") if c]
    unknown = [c for c in codes if c not in result.codes]
    if unknown:
        raise ConfigError(f"unknown area code(s) for radar: {', '.join(unknown)}")
    return codes


def render(run: RunConfig, do_map: bool = False, radar: list[str] | None = None, histogram_bins: int | None = None):
    if do_map and run.render.geometry is None:
        raise ConfigError("--map requested but the config has no render.geometry")
    _, result = compute(run)
    name = run.index.name
    outputs: dict[str, str] = {}
    warnings: list[str] = []

    if do_map:
        layer = load_geojson(run.render.geometry, run.render.key_property)
        palette = run.render.palette or default_palette(run.render.class_count)
        classes = {}
        for kind, scores in (("weighted", result.weighted()), ("unweighted", result.unweighted())):
            classes[kind] = sd_classify(scores, run.render.class_count)
            outputs[f"map_{kind}.svg"] = choropleth_svg(layer, classes[kind], palette, title=f"{name} ({kind})")

    if radar:
        norm = result.normalized
        every = [contribution_breakdown(norm, run.index, code) for code in result.codes]
        max_axis = max(v for b in every for _, v in b) or 1.0
        names = {a.code: a.name for a in result.areas}
        for code in select_radar_areas(result, radar):
            breakdown = contribution_breakdown(norm, run.index, code)
            outputs[f"radar_{code}.svg"] = radar_svg(breakdown, max_axis, title=f"{name}: {names[code]}")

    if histogram_bins is not None:
        bins = corr.histogram(result.weighted_score, histogram_bins)
        outputs["histogram.svg"] = histogram_svg(bins, title=f"Areas by weighted {name} score", x_label=f"{name} (W)")

    paths = {fn: atomic_write_text(run.output_dir / fn, text) for fn, text in outputs.items()}
    if do_map:
        out = run.output_dir / "scores.geojson"
        warnings = inject_geojson_properties(
            run.render.geometry, out, result.weighted(), classes["weighted"], run.render.key_property, result.unweighted()
        )
        paths["scores.geojson"] = out
    return paths, warnings
