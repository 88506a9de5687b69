"""Static SVG output: choropleth map, radar plot and histogram.

Output is byte-deterministic: fixed float formatting, fixed element order,
generic font families only.
"""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

from riskindex.errors import ConfigError, CoverageError, ShapeError
from riskindex.model import ClassifiedLayer
from riskindex.render.geo import GeoLayer

FONT = "sans-serif"
NO_DATA_FILL = "#ffffff"
# sequential light-to-dark, one entry per class
DEFAULT_PALETTE_6 = ("#f2f0f7", "#dadaeb", "#bcbddc", "#9e9ac8", "#756bb1", "#54278f")


def default_palette(class_count: int) -> tuple[str, ...]:
    if class_count == len(DEFAULT_PALETTE_6):
        return DEFAULT_PALETTE_6
    lo, hi = (0xF2, 0xF0, 0xF7), (0x54, 0x27, 0x8F)
    out = []
    for i in range(class_count):
        f = i / max(class_count - 1, 1)
        out.append("#" + "".join(f"{round(a + (b - a) * f):02x}" for a, b in zip(lo, hi)))
    return tuple(out)


def _n(x: float) -> str:
    text = f"{x:.2f}"
    return "0.00" if text == "-0.00" else text


def _header(width: float, height: float) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_n(width)}" height="{_n(height)}" '
        f'viewBox="0 0 {_n(width)} {_n(height)}" font-family="{FONT}">',
        f'<rect x="0" y="0" width="{_n(width)}" height="{_n(height)}" fill="#ffffff"/>',
    ]


def _text(x, y, s, size=12, anchor="start", extra="") -> str:
    return (
        f'<text x="{_n(x)}" y="{_n(y)}" font-size="{size}" text-anchor="{anchor}"{extra}>'
        f"{escape(str(s))}</text>"
    )


def choropleth_svg(
    layer: GeoLayer,
    classified: ClassifiedLayer,
    palette: Sequence[str] | None = None,
    title: str = "",
    width: float = 800.0,
) -> str:
    """One filled path per feature, coloured by class, with a legend."""
    palette = tuple(palette) if palette is not None else default_palette(classified.class_count)
    if len(palette) != classified.class_count:
        raise ConfigError(f"palette has {len(palette)} colours for {classified.class_count} classes")
    missing = sorted(set(classified.assignment) - set(layer.codes))
    if missing:
        raise CoverageError(f"no geometry for areas: {', '.join(missing)}", missing)

    margin = 20.0
    legend_w = 220.0
    title_h = 30.0 if title else 0.0
    x0, y0, x1, y1 = layer.bbox
    span_x = max(x1 - x0, 1e-12)
    span_y = max(y1 - y0, 1e-12)
    map_w = width - legend_w - 2 * margin
    scale = map_w / span_x
    map_h = span_y * scale
    legend_h = 24.0 * classified.class_count + 30.0
    height = max(map_h, legend_h) + 2 * margin + title_h

    def px(x, y):
        return margin + (x - x0) * scale, margin + title_h + (y1 - y) * scale

    out = _header(width, height)
    if title:
        out.append(_text(margin, margin + 14, title, size=16))
    out.append('<g id="areas" stroke="#333333" stroke-width="0.5">')
    for code, rings in layer.features:
        cls = classified.assignment.get(code)
        fill = palette[cls] if cls is not None else NO_DATA_FILL
        d = []
        for ring in rings:
            pts = [px(x, y) for x, y in ring[:-1]]
            d.append("M" + " L".join(f"{_n(a)} {_n(b)}" for a, b in pts) + " Z")
        cls_attr = f' data-class="{cls}"' if cls is not None else ""
        out.append(
            f'<path id={quoteattr("area-" + code)}{cls_attr} fill="{fill}" fill-rule="evenodd" d="{" ".join(d)}"/>'
        )
    out.append("</g>")

    lx = width - legend_w
    ly = margin + title_h
    out.append('<g id="legend">')
    out.append(_text(lx, ly + 12, "Legend", size=13))
    for i, (label, colour) in enumerate(zip(classified.labels, palette)):
        y = ly + 24 + 24 * i
        count = sum(1 for k in classified.assignment.values() if k == i)
        out.append(
            f'<g class="legend-row"><rect x="{_n(lx)}" y="{_n(y)}" width="18" height="14" '
            f'fill="{colour}" stroke="#333333" stroke-width="0.5"/>'
            + _text(lx + 26, y + 11, f"{label} ({count})", size=11)
            + "</g>"
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def radar_svg(
    breakdown: Sequence[tuple[str, float]],
    max_axis: float,
    title: str = "",
    size: float = 480.0,
) -> str:
    """Radar plot with one axis per indicator, first axis at 12 o'clock, clockwise."""
    k = len(breakdown)
    if k < 3:
        raise ShapeError(f"radar plot needs at least 3 axes (got {k})")
    if not max_axis > 0:
        raise ValueError("max_axis must be positive")
    if any(v < 0 for _, v in breakdown):
        raise ValueError("radar contributions must be non-negative")

    title_h = 30.0 if title else 0.0
    cx = size / 2
    cy = size / 2 + title_h
    radius = size / 2 - 90.0

    def point(i, frac):
        theta = 2 * math.pi * i / k
        return cx + radius * frac * math.sin(theta), cy - radius * frac * math.cos(theta)

    out = _header(size, size + title_h)
    if title:
        out.append(_text(size / 2, 20, title, size=16, anchor="middle"))
    out.append('<g id="grid" fill="none" stroke="#bbbbbb" stroke-width="0.5">')
    for frac in (0.25, 0.5, 0.75, 1.0):
        pts = " ".join(f"{_n(a)},{_n(b)}" for a, b in (point(i, frac) for i in range(k)))
        out.append(f'<polygon points="{pts}"/>')
    for i in range(k):
        ex, ey = point(i, 1.0)
        out.append(f'<line class="axis" x1="{_n(cx)}" y1="{_n(cy)}" x2="{_n(ex)}" y2="{_n(ey)}"/>')
    out.append("</g>")

    pts = " ".join(f"{_n(a)},{_n(b)}" for a, b in (point(i, v / max_axis) for i, (_, v) in enumerate(breakdown)))
    out.append(
        f'<polygon id="contribution" points="{pts}" fill="#756bb1" fill-opacity="0.4" stroke="#54278f" stroke-width="1.5"/>'
    )
    out.append('<g id="labels">')
    for i, (label, value) in enumerate(breakdown):
        lx, ly = point(i, 1.12)
        sx = math.sin(2 * math.pi * i / k)
        anchor = "middle" if abs(sx) < 0.2 else ("start" if sx > 0 else "end")
        out.append(_text(lx, ly + 4, f"{label} ({value:.3f})", size=11, anchor=anchor, extra=' class="axis-label"'))
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def histogram_svg(
    bins: Sequence[tuple[float, float, int]],
    title: str = "",
    x_label: str = "score",
    width: float = 640.0,
    height: float = 360.0,
) -> str:
    """Bar chart of histogram bins; empty bins are drawn as zero-height bars."""
    if not bins:
        raise ShapeError("no bins to draw")
    left, right, top, bottom = 50.0, 20.0, 40.0 if title else 20.0, 40.0
    plot_w = width - left - right
    plot_h = height - top - bottom
    peak = max(c for _, _, c in bins) or 1
    bar_w = plot_w / len(bins)

    out = _header(width, height)
    if title:
        out.append(_text(width / 2, 22, title, size=15, anchor="middle"))
    out.append(
        f'<line x1="{_n(left)}" y1="{_n(top + plot_h)}" x2="{_n(left + plot_w)}" y2="{_n(top + plot_h)}" stroke="#333333"/>'
    )
    out.append(f'<line x1="{_n(left)}" y1="{_n(top)}" x2="{_n(left)}" y2="{_n(top + plot_h)}" stroke="#333333"/>')
    out.append('<g id="bars" fill="#756bb1" stroke="#ffffff" stroke-width="0.5">')
    for i, (lo, hi, count) in enumerate(bins):
        h = plot_h * count / peak
        out.append(
            f'<rect class="bar" data-count="{count}" x="{_n(left + i * bar_w)}" y="{_n(top + plot_h - h)}" '
            f'width="{_n(bar_w)}" height="{_n(h)}"><title>{lo:.4f} to {hi:.4f}: {count}</title></rect>'
        )
    out.append("</g>")
    out.append(_text(left, height - 12, f"{bins[0][0]:.3f}", size=10, anchor="middle"))
    out.append(_text(left + plot_w, height - 12, f"{bins[-1][1]:.3f}", size=10, anchor="middle"))
    out.append(_text(left + plot_w / 2, height - 12, x_label, size=11, anchor="middle"))
    out.append(_text(left - 6, top + 4, str(peak), size=10, anchor="end"))
    out.append(_text(left - 6, top + plot_h, "0", size=10, anchor="end"))
    out.append("</svg>")
    return "\n".join(out) + "\n"
