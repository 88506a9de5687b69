"""Standard-deviation class intervals for choropleth maps."""

from __future__ import annotations

import bisect
import statistics
from typing import Mapping

from riskindex.errors import DegenerateError
from riskindex.model import ClassifiedLayer

DEFAULT_CLASS_COUNT = 6


def sd_offsets(class_count: int) -> list[float]:
    """Cut-point offsets from the mean, in units of one standard deviation.

    Cut points are one SD apart and symmetric about the mean: an even class
    count puts a cut at the mean (6 classes: -2..2), an odd count straddles it
    with half-SD offsets (7 classes: -2.5..2.5).
    """
    if class_count < 2:
        raise ValueError("class_count must be >= 2")
    centre = (class_count - 2) / 2
    return [k - centre for k in range(class_count - 1)]


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def sd_classify(scores: Mapping[str, float], class_count: int = DEFAULT_CLASS_COUNT) -> ClassifiedLayer:
    values = list(scores.values())
    if len(set(values)) < 2:
        raise DegenerateError("SD classification needs at least two distinct scores")
    mean = statistics.fmean(values)
    sd = statistics.stdev(values)
    cuts = [mean + k * sd for k in sd_offsets(class_count)]
    if any(a >= b for a, b in zip(cuts, cuts[1:])):
        # spread below float resolution at this magnitude
        raise DegenerateError(f"score spread (sd={sd!r}) too small to separate {class_count} classes")
    lo, hi = min(values), max(values)

    labels = []
    for i in range(class_count):
        if i == 0:
            labels.append(f"{_fmt(lo)} to {_fmt(cuts[0])}" if lo < cuts[0] else f"< {_fmt(cuts[0])}")
        elif i == class_count - 1:
            labels.append(f"{_fmt(cuts[-1])} to {_fmt(hi)}" if hi >= cuts[-1] else f">= {_fmt(cuts[-1])}")
        else:
            labels.append(f"{_fmt(cuts[i - 1])} to {_fmt(cuts[i])}")

    assignment = {code: bisect.bisect_right(cuts, v) for code, v in scores.items()}
    return ClassifiedLayer(breaks=tuple(cuts), labels=tuple(labels), assignment=assignment)
