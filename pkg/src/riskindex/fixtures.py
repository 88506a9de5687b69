"""Generator for the bundled reference datasets.

Two fixtures live under ``riskindex/data``:

``imdr/``
    207 synthetic areas (32 of them a "London" block) with the nine IMDR
    indicators, four validation measures, boundary geometry and an oracle
    file of expected correlation matrices. Values follow a north-south risk
    gradient with a low-risk, young, deprived capital, so the analysis has
    the same qualitative structure as the real CCG data. The hearing-loss
    indicator is shipped as counts on older boundaries (three accretions,
    two renames) to exercise boundary merging and rate conversion.

``mini/``
    6 areas x 3 indicators chosen so every intermediate value is exact in
    binary floating point; used for the hand-checked pipeline oracle.

The oracle numbers are computed here with plain-Python arithmetic that
shares no code with :mod:`riskindex.stats` or :mod:`riskindex.correlate`.
Run ``python scripts/make_fixtures.py`` to regenerate.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

SEED = 20180601
N_AREAS = 207
GRID_COLS = 9
GRID_ROWS = 23
CELL = 20_000.0  # metres, British National Grid style planar units
ORIGIN = (380_000.0, 80_000.0)
LONDON_ROWS = range(0, 4)
LONDON_COLS = range(1, 9)

# id, label, polarity, weight %, base, slope on latent risk, noise sd, decimals
IMDR_INDICATORS = [
    ("obesity", "Obesity prevalence (16+)", "risk_increasing", 6, 9.5, 1.5, 2.4, 2),
    ("alcohol", "Binge drinking prevalence (16+)", "risk_increasing", 21, 20.0, 3.0, 4.4, 2),
    ("education", "Achieving 5 A*-C GCSE inc. English & Maths", "risk_decreasing", 21, 58.0, -4.5, 6.0, 1),
    ("hearing", "Hearing loss prevalence (25 dBHL+)", "risk_increasing", 18, 16.0, 1.75, 2.0, None),
    ("smoking", "Smoking prevalence (15+)", "risk_increasing", 12, 18.0, 2.5, 3.6, 2),
    ("depression", "Depression prevalence (18+)", "risk_increasing", 8, 6.5, 1.0, 1.6, 2),
    ("hypertension", "Hypertension prevalence", "risk_increasing", 4, 13.5, 1.5, 2.2, 2),
    ("diet", "Healthy eating adults", "risk_decreasing", 8, 28.0, -3.0, 4.0, 2),
    ("diabetes", "Diabetes prevalence (18+)", "risk_increasing", 2, 6.2, 0.75, 1.2, 2),
]

SOURCE_NOTES = {
    "obesity": "Recorded prevalence of obesity (16+), 2013/14",
    "alcohol": "Modelled prevalence of binge drinkers (16+), 2006-2008",
    "education": "GCSE achievement (5A*-C inc. English & Maths), 2013/14",
    "hearing": "Estimated prevalence of hearing loss >= 25 dBHL, 2014; founding boundaries, counts",
    "smoking": "Smoking recorded prevalence (15+), 2013/14",
    "depression": "Depression recorded prevalence (18+), 2013/14",
    "hypertension": "Hypertension recorded prevalence (all ages), 2013/14",
    "diet": "Healthy eating adults estimated prevalence (16+), 2006-2008",
    "diabetes": "Diabetes recorded prevalence (18+), 2013/14",
}

VALIDATION = [
    ("imd", "IMD (2015)", "imd.csv"),
    ("dem_rec", "Dem.Rec.Prev.", "dementia_recorded.csv"),
    ("dem_est", "Dem.Est.Prev.", "dementia_estimated.csv"),
    ("avg_age", "Avg. Age", "avg_age.csv"),
]

# new code -> old constituent count (accretions) and renamed areas
ACCRETIONS = {17: 3, 150: 2, 190: 2}
RENAMES = (60, 120)

WEIGHTED_VS_UNWEIGHTED_RANGE = (0.94, 0.98)


def area_code(i: int) -> str:
    return f"E38{i + 1:06d}"


# -- plain-Python oracle --------------------------------------------------


def oracle_mean(xs):
    return math.fsum(xs) / len(xs)


def oracle_pearson(xs, ys):
    mx, my = oracle_mean(xs), oracle_mean(ys)
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(xs, ys))
    sxx = math.fsum((a - mx) ** 2 for a in xs)
    syy = math.fsum((b - my) ** 2 for b in ys)
    return sxy / math.sqrt(sxx * syy)


def oracle_residuals(ys, zs):
    """Residuals of the least-squares line of ys on zs."""
    mz, my = oracle_mean(zs), oracle_mean(ys)
    slope = math.fsum((z - mz) * (y - my) for z, y in zip(zs, ys)) / math.fsum((z - mz) ** 2 for z in zs)
    return [y - (my + slope * (z - mz)) for y, z in zip(ys, zs)]


def oracle_partial(xs, ys, zs):
    return oracle_pearson(oracle_residuals(xs, zs), oracle_residuals(ys, zs))


def oracle_index(columns, weights_pct, reversed_flags):
    """Min-max, polarity and both aggregations over plain lists.

    ``columns`` is a list of per-indicator value lists (same area order).
    Returns ``(unweighted, weighted)`` lists.
    """
    k = len(columns)
    n = len(columns[0])
    norm = []
    for col, rev in zip(columns, reversed_flags):
        lo, hi = min(col), max(col)
        vals = [(x - lo) / (hi - lo) for x in col]
        norm.append([1.0 - v for v in vals] if rev else vals)
    total = math.fsum(weights_pct)
    unweighted = [math.fsum(norm[i][j] for i in range(k)) / k for j in range(n)]
    weighted = [math.fsum(norm[i][j] * weights_pct[i] / total for i in range(k)) for j in range(n)]
    return unweighted, weighted


# -- synthetic areas -------------------------------------------------------


def _grid_position(i):
    return divmod(i, GRID_COLS)  # (row, col), row 0 is the southern edge


def _is_london(i):
    row, col = _grid_position(i)
    return row in LONDON_ROWS and col in LONDON_COLS


def generate(seed: int = SEED) -> dict:
    """Build the 207-area dataset in memory (deterministic for a seed)."""
    rng = np.random.default_rng(seed)
    codes = [area_code(i) for i in range(N_AREAS)]
    london = [_is_london(i) for i in range(N_AREAS)]
    north = [_grid_position(i)[0] / (GRID_ROWS - 1) for i in range(N_AREAS)]

    shared = rng.normal(0.0, 1.0, N_AREAS)
    latent = [0.9 * (2.0 * g - 1.0) + 0.45 * s - (0.9 if ldn else 0.0) for g, s, ldn in zip(north, shared, london)]

    rates = {}
    for ind, _label, _pol, _w, base, slope, noise, decimals in IMDR_INDICATORS:
        eps = rng.normal(0.0, noise, N_AREAS)
        vals = [base + slope * lat + e for lat, e in zip(latent, eps)]
        rates[ind] = [round(v, decimals) if decimals is not None else v for v in vals]

    population = [int(p) for p in rng.integers(90_000, 620_000, N_AREAS)]
    # hearing loss arrives as integer counts; the effective rate is what the pipeline sees
    hearing_counts = [int(round(r / 100.0 * p)) for r, p in zip(rates["hearing"], population)]
    rates["hearing"] = [100.0 * c / p for c, p in zip(hearing_counts, population)]

    age_noise = rng.normal(0.0, 1.1, N_AREAS)
    avg_age = [round(39.5 + 3.0 * g - (3.5 if ldn else 0.0) + e, 2) for g, ldn, e in zip(north, london, age_noise)]
    imd_noise = rng.normal(0.0, 4.0, N_AREAS)
    imd = [
        round(max(5.0, 20.0 + 6.0 * lat - 0.8 * (age - 40.0) + (6.0 if ldn else 0.0) + e), 3)
        for lat, age, ldn, e in zip(latent, avg_age, london, imd_noise)
    ]
    rec_noise = rng.normal(0.0, 0.18, N_AREAS)
    dem_rec = [round(4.3 + 0.08 * imd_v / 10.0 - 0.03 * (age - 40.0) + e, 2) for imd_v, age, e in zip(imd, avg_age, rec_noise)]
    est_noise = rng.normal(0.0, 1.3, N_AREAS)
    dem_est = [round(52.0 + 4.0 * r + 0.15 * imd_v + e, 1) for r, imd_v, e in zip(dem_rec, imd, est_noise)]

    return {
        "codes": codes,
        "names": [f"{'London' if ldn else 'Area'} CCG {i + 1:03d}" for i, ldn in enumerate(london)],
        "london": london,
        "rates": rates,
        "population": population,
        "hearing_counts": hearing_counts,
        "validation": {"imd": imd, "dem_rec": dem_rec, "dem_est": dem_est, "avg_age": avg_age},
    }


def oracle_report(data: dict) -> dict:
    """Expected validation correlations computed without the package."""
    ids = [row[0] for row in IMDR_INDICATORS]
    columns = [data["rates"][i] for i in ids]
    unweighted, weighted = oracle_index(
        columns, [row[3] for row in IMDR_INDICATORS], [row[2] == "risk_decreasing" for row in IMDR_INDICATORS]
    )
    names = ["IMDR (W)", "IMDR (Uw)"] + [label for _, label, _ in VALIDATION]
    series = [weighted, unweighted] + [data["validation"][vid] for vid, _, _ in VALIDATION]
    keep_all = list(range(N_AREAS))
    keep_outside = [j for j in keep_all if not data["london"][j]]

    def matrix(keep):
        vs = [[s[j] for j in keep] for s in series]
        return [[1.0 if a == b else oracle_pearson(vs[a], vs[b]) for b in range(len(vs))] for a in range(len(vs))]

    def partial(keep, control):
        vs = [[s[j] for j in keep] for s in series]
        z = vs[control]
        rest = [i for i in range(len(vs)) if i != control]
        return [[1.0 if a == b else oracle_partial(vs[a], vs[b], z) for b in rest] for a in rest]

    age = names.index("Avg. Age")
    return {
        "variables": names,
        "weighted_vs_unweighted": oracle_pearson(weighted, unweighted),
        "scores": {"weighted": weighted, "unweighted": unweighted},
        "pearson": {"n": len(keep_all), "r": matrix(keep_all)},
        "pearson_excl_london": {"n": len(keep_outside), "r": matrix(keep_outside)},
        "partial_avg_age": {
            "n": len(keep_all),
            "control": "Avg. Age",
            "variables": [v for v in names if v != "Avg. Age"],
            "r": partial(keep_all, age),
        },
    }


# -- geometry ----------------------------------------------------------------


def _square(i):
    row, col = _grid_position(i)
    x0 = ORIGIN[0] + col * CELL
    y0 = ORIGIN[1] + row * CELL
    ring = [[x0, y0], [x0 + CELL, y0], [x0 + CELL, y0 + CELL], [x0, y0 + CELL], [x0, y0]]
    return {"type": "Polygon", "coordinates": [ring]}


def geojson(data: dict) -> dict:
    return {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": {"code": code, "name": name},
                "geometry": _square(i),
            }
            for i, (code, name) in enumerate(zip(data["codes"], data["names"]))
        ],
    }


# -- writing -----------------------------------------------------------------


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _num(x) -> str:
    return repr(float(x)) if not isinstance(x, int) else str(x)


def _old_boundaries(data: dict):
    """Counts and old->new mapping on the founding boundaries."""
    rng = np.random.default_rng(SEED + 1)
    counts, mapping = [], []
    next_old = 900
    for i, code in enumerate(data["codes"]):
        total = data["hearing_counts"][i]
        if i in ACCRETIONS:
            parts = ACCRETIONS[i]
            cuts = sorted(int(c) for c in rng.integers(1, total, parts - 1))
            shares = [b - a for a, b in zip([0] + cuts, cuts + [total])]
            for share in shares:
                old = f"E38{next_old:06d}"
                next_old += 1
                counts.append((old, share))
                mapping.append((old, code, "accretion"))
        elif i in RENAMES:
            old = f"E38{next_old:06d}"
            next_old += 1
            counts.append((old, total))
            mapping.append((old, code, "minor_change"))
        else:
            counts.append((code, total))
            mapping.append((code, code, "accretion"))
    return counts, mapping


def imdr_index_config() -> dict:
    return {
        "name": "IMDR",
        "display_decimals": 4,
        "indicators": [
            {"id": ind, "label": label, "polarity": pol, "weight_percent": w, "source_note": SOURCE_NOTES[ind]}
            for ind, label, pol, w, *_ in IMDR_INDICATORS
        ],
    }


def imdr_run_config() -> dict:
    inputs = {}
    for ind, *_ in IMDR_INDICATORS:
        if ind == "hearing":
            inputs[ind] = {
                "path": "indicators/hearing_counts_2013.csv",
                "area_column": "code",
                "value_column": "count",
                "boundary_mapping": {"path": "boundaries/ccg_2013_to_2017.csv"},
                "convert": {"population": "population.csv", "scale": 100},
            }
        else:
            inputs[ind] = {"path": f"indicators/{ind}.csv", "area_column": "code", "value_column": "value"}
    return {
        "index": imdr_index_config(),
        "areas": {"path": "areas.csv", "code_column": "code", "name_column": "name"},
        "inputs": inputs,
        "validation": [
            {"id": vid, "label": label, "path": f"validation/{fn}", "area_column": "code", "value_column": "value"}
            for vid, label, fn in VALIDATION
        ],
        "exclusions": {"london_ccgs": {"path": "london_ccgs.csv", "area_column": "code"}},
        "render": {"geometry": "ccg_boundaries.geojson", "key_property": "code", "class_count": 6},
        "output_dir": "output",
    }


def imdr_files(seed: int = SEED) -> dict[str, str]:
    """Relative path -> file content for the 207-area fixture."""
    data = generate(seed)
    codes = data["codes"]
    files = {}
    files["areas.csv"] = _csv([["code", "name", "london"]] + [[c, n, int(l)] for c, n, l in zip(codes, data["names"], data["london"])])
    files["population.csv"] = _csv([["code", "population"]] + [[c, p] for c, p in zip(codes, data["population"])])
    files["london_ccgs.csv"] = _csv([["code"]] + [[c] for c, l in zip(codes, data["london"]) if l])
    for ind, *_ in IMDR_INDICATORS:
        if ind == "hearing":
            continue
        files[f"indicators/{ind}.csv"] = _csv([["code", "value"]] + [[c, _num(v)] for c, v in zip(codes, data["rates"][ind])])
    counts, mapping = _old_boundaries(data)
    files["indicators/hearing_counts_2013.csv"] = _csv([["code", "count"]] + [[c, n] for c, n in counts])
    files["boundaries/ccg_2013_to_2017.csv"] = _csv([["old_code", "new_code", "mode"]] + [list(m) for m in mapping])
    for vid, _label, fn in VALIDATION:
        files[f"validation/{fn}"] = _csv([["code", "value"]] + [[c, _num(v)] for c, v in zip(codes, data["validation"][vid])])
    files["ccg_boundaries.geojson"] = json.dumps(geojson(data), indent=1) + "\n"
    files["imdr_run.json"] = json.dumps(imdr_run_config(), indent=2) + "\n"
    oracle = oracle_report(data)
    lo, hi = WEIGHTED_VS_UNWEIGHTED_RANGE
    if not lo <= oracle["weighted_vs_unweighted"] <= hi:
        raise RuntimeError(f"fixture weighted/unweighted r={oracle['weighted_vs_unweighted']:.4f} outside [{lo}, {hi}]")
    files["expected_correlations.json"] = json.dumps(oracle, indent=1) + "\n"
    return files


# 6 areas x 3 indicators: ranges are powers of two, so normalised values,
# polarity flips and weighted sums are all exact in binary.
MINI_AREAS = [
    ("M01", "Alder"),
    ("M02", "Birch"),
    ("M03", "Cedar"),
    ("M04", "Damson"),
    ("M05", "Elm"),
    ("M06", "Fir"),
]
MINI_VALUES = {
    "smoking": [10.0, 14.0, 12.0, 11.0, 13.0, 10.5],
    "education": [60.0, 56.0, 58.0, 57.0, 59.0, 60.0],
    "hearing": [4.0, 8.0, 6.0, 5.0, 7.0, 4.5],
}


def mini_files() -> dict[str, str]:
    files = {"areas.csv": _csv([["code", "name"]] + [list(a) for a in MINI_AREAS])}
    for ind, vals in MINI_VALUES.items():
        files[f"{ind}.csv"] = _csv([["code", "name", "rate"]] + [[c, n, _num(v)] for (c, n), v in zip(MINI_AREAS, vals)])
    run = {
        "index": {
            "name": "MINI",
            "display_decimals": 4,
            "indicators": [
                {"id": "smoking", "label": "Smoking", "polarity": "risk_increasing", "weight_percent": 50},
                {"id": "education", "label": "GCSE achievement", "polarity": "risk_decreasing", "weight_percent": 25},
                {"id": "hearing", "label": "Hearing loss", "polarity": "risk_increasing", "weight_percent": 25},
            ],
        },
        "areas": {"path": "areas.csv", "code_column": "code", "name_column": "name"},
        "inputs": {ind: {"path": f"{ind}.csv", "area_column": "code", "value_column": "rate"} for ind in MINI_VALUES},
        "output_dir": "output",
    }
    files["mini_run.json"] = json.dumps(run, indent=2) + "\n"
    return files


def write_all(root) -> list[Path]:
    root = Path(root)
    written = []
    for sub, files in (("imdr", imdr_files()), ("mini", mini_files())):
        for rel, text in files.items():
            path = root / sub / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            written.append(path)
    return written
