"""Exact rational oracle for the bundled 6-area mini fixture.

Computed from the raw fixture values with ``fractions.Fraction`` so the
expected floats are the correctly rounded true values.
"""

from fractions import Fraction

from riskindex.fixtures import MINI_AREAS, MINI_VALUES

WEIGHTS = {"smoking": Fraction(1, 2), "education": Fraction(1, 4), "hearing": Fraction(1, 4)}
REVERSED = {"education"}


def expected():
    codes = [c for c, _ in MINI_AREAS]
    norm = {}
    for ind, raw in MINI_VALUES.items():
        vals = [Fraction(v) for v in raw]
        lo, hi = min(vals), max(vals)
        col = [(v - lo) / (hi - lo) for v in vals]
        norm[ind] = [1 - v for v in col] if ind in REVERSED else col
    unweighted = [sum(norm[i][a] for i in MINI_VALUES) / len(MINI_VALUES) for a in range(len(codes))]
    weighted = [sum(WEIGHTS[i] * norm[i][a] for i in MINI_VALUES) for a in range(len(codes))]
    distinct = sorted(set(weighted), reverse=True)
    ranks = [distinct.index(w) + 1 for w in weighted]
    return {
        code: {
            "normalized": [norm[i][a] for i in MINI_VALUES],
            "unweighted": unweighted[a],
            "weighted": weighted[a],
            "rank": ranks[a],
        }
        for a, code in enumerate(codes)
    }
