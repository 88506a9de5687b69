from riskindex.render.classify import sd_classify, sd_offsets
from riskindex.render.geo import GeoLayer, inject_geojson_properties, load_geojson
from riskindex.render.svg import choropleth_svg, default_palette, histogram_svg, radar_svg

__all__ = [
    "GeoLayer",
    "choropleth_svg",
    "default_palette",
    "histogram_svg",
    "inject_geojson_properties",
    "load_geojson",
    "radar_svg",
    "sd_classify",
    "sd_offsets",
]
