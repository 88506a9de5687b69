"""Composite area-level risk index construction and validation."""

from riskindex.model import (
    AreaId,
    ClassifiedLayer,
    CorrelationReport,
    IndexConfig,
    IndexResult,
    IndicatorSpec,
    IndicatorTable,
    Polarity,
    normalized_weights,
    validate_config,
)
from riskindex.stats import build_index

__version__ = "0.1.0"
