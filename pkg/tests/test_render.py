import json
import math
import statistics
import xml.etree.ElementTree as ET

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from riskindex import pipeline
from riskindex.errors import ConfigError, CoverageError, DegenerateError, DuplicateError, ShapeError
from riskindex.model import ClassifiedLayer
from riskindex.render import (
    GeoLayer,
    choropleth_svg,
    histogram_svg,
    inject_geojson_properties,
    load_geojson,
    radar_svg,
    sd_classify,
    sd_offsets,
)
from riskindex.render.svg import DEFAULT_PALETTE_6
from riskindex.stats import contribution_breakdown

from conftest import IMDR_RUN, TABLE4

SVG = "{http://www.w3.org/2000/svg}"


def square(x, y, s=1.0):
    return ((x, y), (x + s, y), (x + s, y + s), (x, y + s), (x, y))


def parse(svg):
    return ET.fromstring(svg.encode("utf-8"))


def test_offsets():
    assert sd_offsets(6) == [-2, -1, 0, 1, 2]
    assert sd_offsets(7) == [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5]
    assert sd_offsets(4) == [-1, 0, 1]
    with pytest.raises(ValueError):
        sd_offsets(1)


def test_sd_breaks_by_hand():
    # mean 0.5, sample sd exactly 0.1
    scores = {"a": 0.4, "b": 0.5, "c": 0.6}
    layer = sd_classify(scores, class_count=7)
    expected = [0.25, 0.35, 0.45, 0.55, 0.65, 0.75]
    assert layer.breaks == pytest.approx(expected, abs=1e-12)
    assert layer.assignment == {"a": 2, "b": 3, "c": 4}
    # outer labels are clamped to the data range
    assert layer.labels[0] == "< 0.2500"
    assert layer.labels[-1] == ">= 0.7500"
    assert layer.labels[3] == "0.4500 to 0.5500"


def test_two_area_classes_mirror():
    layer = sd_classify({"lo": 0.0, "hi": 1.0})
    k = layer.class_count
    # 6 classes put a cut at the mean, so the two areas sit symmetrically about it
    assert layer.assignment["lo"] + layer.assignment["hi"] == k - 1
    assert layer.assignment["lo"] < layer.assignment["hi"]


def test_degenerate_scores():
    with pytest.raises(DegenerateError):
        sd_classify({"a": 0.3, "b": 0.3, "c": 0.3})
    # distinct, but the cut points collapse onto each other
    with pytest.raises(DegenerateError, match="too small"):
        sd_classify({"a": 0.0, "b": 2.2e-309}, class_count=4)


@given(st.dictionaries(st.text("ABCDEFGH", min_size=1, max_size=4), st.floats(0, 1), min_size=2, max_size=60),
       st.sampled_from([4, 6, 7]))
def test_classification_total_and_monotone(scores, classes):
    assume(max(scores.values()) - min(scores.values()) > 1e-12)
    layer = sd_classify(scores, classes)
    assert set(layer.assignment) == set(scores)
    ordered = sorted(scores, key=scores.get)
    ranks = [layer.assignment[c] for c in ordered]
    assert ranks == sorted(ranks)
    assert all(0 <= r < classes for r in ranks)


def test_six_class_breaks_follow_sample_sd():
    scores = {f"E{i}": v for i, v in enumerate([0.1, 0.2, 0.35, 0.4, 0.5, 0.9])}
    layer = sd_classify(scores)
    m = statistics.fmean(scores.values())
    s = statistics.stdev(scores.values())
    assert layer.breaks == pytest.approx([m - 2 * s, m - s, m, m + s, m + 2 * s], abs=1e-15)


def two_squares():
    layer = GeoLayer((("A", (square(0, 0),)), ("B", (square(1, 0),))))
    classes = ClassifiedLayer(breaks=(0.5,), labels=("low", "high"), assignment={"A": 0, "B": 1})
    return layer, classes


def test_choropleth_two_squares():
    layer, classes = two_squares()
    svg = choropleth_svg(layer, classes, palette=["#eeeeee", "#333333"])
    root = parse(svg)
    paths = root.findall(f".//{SVG}path")
    assert len(paths) == 2
    assert [p.get("fill") for p in paths] == ["#eeeeee", "#333333"]
    assert len(root.findall(f".//{SVG}g[@class='legend-row']")) == 2
    assert choropleth_svg(layer, classes, palette=["#eeeeee", "#333333"]) == svg


def test_choropleth_errors():
    layer, classes = two_squares()
    with pytest.raises(ConfigError):
        choropleth_svg(layer, sd_classify({"A": 0.0, "B": 1.0}), palette=DEFAULT_PALETTE_6[:5])
    partial = GeoLayer((("A", (square(0, 0),)),))
    with pytest.raises(CoverageError, match="B"):
        choropleth_svg(partial, classes, palette=["#eeeeee", "#333333"])


def test_empty_class_keeps_legend_row():
    layer = GeoLayer(tuple((c, (square(i, 0),)) for i, c in enumerate("ABC")))
    classes = ClassifiedLayer(breaks=(1, 2, 3, 4, 5), labels=tuple("abcdef"), assignment={"A": 0, "B": 0, "C": 5})
    root = parse(choropleth_svg(layer, classes))
    rows = root.findall(f".//{SVG}g[@class='legend-row']")
    assert len(rows) == 6
    assert rows[2].find(f"{SVG}text").text.endswith("(0)")


def test_geo_layer_validation():
    with pytest.raises(DuplicateError):
        GeoLayer((("A", (square(0, 0),)), ("A", (square(1, 0),))))
    with pytest.raises(Exception):
        GeoLayer((("A", (((0, 0), (1, 0), (1, 1), (0, 1)),)),))


def radar_points(svg):
    poly = parse(svg).find(f".//{SVG}polygon[@id='contribution']")
    return [tuple(map(float, p.split(","))) for p in poly.get("points").split()]


def test_radar_zero_contributions():
    svg = radar_svg([("a", 0.0), ("b", 0.0), ("c", 0.0)], max_axis=1.0)
    pts = radar_points(svg)
    assert len(set(pts)) == 1


def test_radar_full_radius_vertex():
    svg = radar_svg([("a", 0.2), ("b", 0.0), ("c", 0.0), ("d", 0.0)], max_axis=0.2, size=480)
    (x0, y0), (x1, y1) = radar_points(svg)[:2]
    # centre is (240, 240), radius 150; first axis points up
    assert (x0, y0) == (240.0, 90.0)
    assert (x1, y1) == (240.0, 240.0)


def test_radar_clockwise_from_top():
    svg = radar_svg([("n", 1.0), ("e", 1.0), ("s", 1.0), ("w", 1.0)], max_axis=1.0, size=480)
    pts = radar_points(svg)
    assert pts == [(240.0, 90.0), (390.0, 240.0), (240.0, 390.0), (90.0, 240.0)]


def test_radar_needs_three_axes():
    with pytest.raises(ShapeError):
        radar_svg([("a", 0.1), ("b", 0.2)], max_axis=1.0)


def test_imdr_radar_labels_in_weight_table_order():
    run = pipeline.load_run_config(IMDR_RUN)
    _, result = pipeline.compute(run)
    code = result.areas[0].code
    breakdown = contribution_breakdown(result.normalized, run.index, code)
    svg = radar_svg(breakdown, max_axis=max(v for _, v in breakdown))
    labels = [t.text for t in parse(svg).findall(f".//{SVG}text[@class='axis-label']")]
    assert len(labels) == 9
    ids = [spec.id for spec in run.index.indicators]
    assert ids == [i for i, _ in TABLE4]
    expected = [spec.display_label for spec in run.index.indicators]
    assert [label.rsplit(" (", 1)[0] for label in labels] == expected
    assert labels[2].startswith("NOT ")


def test_histogram_svg_bars():
    bins = [(0.0, 0.5, 3), (0.5, 1.0, 0), (1.0, 1.5, 6)]
    root = parse(histogram_svg(bins))
    bars = root.findall(f".//{SVG}rect[@class='bar']")
    assert len(bars) == 3
    assert bars[1].get("height") == "0.00"
    assert float(bars[2].get("height")) == pytest.approx(2 * float(bars[0].get("height")), abs=0.01)


def feature_collection(codes):
    return {
        "type": "FeatureCollection",
        "features": [
            {"type": "Feature", "properties": {"code": c, "name": c.lower()},
             "geometry": {"type": "Polygon", "coordinates": [[list(p) for p in square(i, 0)]]}}
            for i, c in enumerate(codes)
        ],
    }


def test_inject_empty_scores_is_noop(tmp_path):
    src = tmp_path / "in.geojson"
    doc = feature_collection(["A", "B"])
    src.write_text(json.dumps(doc))
    warnings = inject_geojson_properties(src, tmp_path / "out.geojson", {}, None, "code")
    assert json.loads((tmp_path / "out.geojson").read_text()) == doc
    assert len(warnings) == 2


def test_inject_two_features(tmp_path):
    src = tmp_path / "in.geojson"
    src.write_text(json.dumps(feature_collection(["A", "B"])))
    scores = {"A": 0.2, "B": 0.8}
    layer = sd_classify(scores)
    warnings = inject_geojson_properties(src, tmp_path / "out.geojson", scores, layer, "code", unweighted={"A": 0.3})
    assert warnings == []
    feats = json.loads((tmp_path / "out.geojson").read_text())["features"]
    for f in feats:
        assert 0 <= f["properties"]["imdr_class"] < layer.class_count
        assert f["properties"]["imdr_weighted"] == scores[f["properties"]["code"]]
    assert feats[0]["properties"]["imdr_unweighted"] == 0.3
    assert "imdr_unweighted" not in feats[1]["properties"]


def test_inject_rejects_duplicates(tmp_path):
    src = tmp_path / "in.geojson"
    src.write_text(json.dumps(feature_collection(["A", "A"])))
    with pytest.raises(DuplicateError):
        inject_geojson_properties(src, tmp_path / "out.geojson", {"A": 0.5}, None, "code")


def test_fixture_geometry_round_trips(tmp_path):
    run = pipeline.load_run_config(IMDR_RUN)
    _, result = pipeline.compute(run)
    scores = result.weighted()
    out = tmp_path / "scores.geojson"
    inject_geojson_properties(run.render.geometry, out, scores, sd_classify(scores), "code")
    before = json.loads(run.render.geometry.read_text())
    after = json.loads(out.read_text())
    assert [f["geometry"] for f in after["features"]] == [f["geometry"] for f in before["features"]]
    assert load_geojson(out, "code") == load_geojson(run.render.geometry, "code")


def test_fixture_choropleth_structure():
    run = pipeline.load_run_config(IMDR_RUN)
    _, result = pipeline.compute(run)
    layer = load_geojson(run.render.geometry, "code")
    classes = sd_classify(result.weighted(), 6)
    svg = choropleth_svg(layer, classes, title="IMDR (W)")
    root = parse(svg)
    assert len(root.findall(f".//{SVG}path")) == len(layer.features) == 207
    assert len(root.findall(f".//{SVG}g[@class='legend-row']")) == 6
    counts = [int(r.find(f"{SVG}text").text.rsplit("(", 1)[1].rstrip(")"))
              for r in root.findall(f".//{SVG}g[@class='legend-row']")]
    assert sum(counts) == 207
    assert math.isclose(sum(counts), len(classes.assignment))
