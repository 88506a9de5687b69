"""GeoJSON geometry loading and score property injection."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from riskindex.errors import DuplicateError, SchemaError
from riskindex.fileio import atomic_write_text
from riskindex.model import ClassifiedLayer

Ring = tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class GeoLayer:
    """Planar (pre-projected) polygons keyed by area code."""

    features: tuple[tuple[str, tuple[Ring, ...]], ...]

    def __post_init__(self):
        codes = [code for code, _ in self.features]
        if len(set(codes)) != len(codes):
            dupes = [c for c in codes if codes.count(c) > 1]
            raise DuplicateError(dupes, "geometry layer")
        for code, rings in self.features:
            if not rings:
                raise SchemaError(f"feature {code} has no rings")
            for ring in rings:
                if len(ring) < 4 or ring[0] != ring[-1]:
                    raise SchemaError(f"feature {code} has an unclosed or short ring")

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(code for code, _ in self.features)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        xs = [x for _, rings in self.features for ring in rings for x, _ in ring]
        ys = [y for _, rings in self.features for ring in rings for _, y in ring]
        return min(xs), min(ys), max(xs), max(ys)


def _rings(geometry) -> list[Ring]:
    kind = geometry.get("type")
    coords = geometry.get("coordinates")
    if kind == "Polygon":
        polygons = [coords]
    elif kind == "MultiPolygon":
        polygons = coords
    else:
        raise SchemaError(f"unsupported geometry type {kind!r}")
    return [tuple((float(p[0]), float(p[1])) for p in ring) for poly in polygons for ring in poly]


def load_geojson(path, key_property: str) -> GeoLayer:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    features = []
    for i, feat in enumerate(doc.get("features", [])):
        props = feat.get("properties") or {}
        if key_property not in props:
            raise SchemaError(f"{path}: feature {i} lacks property {key_property!r}")
        features.append((str(props[key_property]), tuple(_rings(feat["geometry"]))))
    return GeoLayer(tuple(features))


def inject_geojson_properties(
    geojson_in,
    geojson_out,
    scores: Mapping[str, float],
    classified: ClassifiedLayer | None,
    key_property: str,
    unweighted: Mapping[str, float] | None = None,
    prefix: str = "imdr",
) -> list[str]:
    """Copy a GeoJSON file, adding score and class properties per feature.

    Returns warnings for features whose code has no score. Geometry is passed
    through untouched.
    """
    doc = json.loads(Path(geojson_in).read_text(encoding="utf-8"))
    features = doc.get("features", [])
    codes = [str((f.get("properties") or {}).get(key_property)) for f in features]
    dupes = sorted({c for c in codes if codes.count(c) > 1})
    if dupes:
        raise DuplicateError(dupes, str(geojson_in))

    warnings = []
    for feat, code in zip(features, codes):
        props = feat.get("properties")
        if props is None or key_property not in props:
            warnings.append(f"feature without {key_property!r} property left unchanged")
            continue
        if code not in scores:
            warnings.append(f"no score for feature {code}")
            continue
        props[f"{prefix}_weighted"] = float(scores[code])
        if unweighted is not None and code in unweighted:
            props[f"{prefix}_unweighted"] = float(unweighted[code])
        if classified is not None and code in classified.assignment:
            props[f"{prefix}_class"] = int(classified.assignment[code])
    atomic_write_text(geojson_out, json.dumps(doc, ensure_ascii=False) + "\n")
    return warnings
