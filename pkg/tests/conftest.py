import sys
from pathlib import Path

import pytest

import riskindex
from riskindex.model import IndexConfig, IndicatorSpec, Polarity

DATA = Path(riskindex.__file__).parent / "data"
IMDR_RUN = DATA / "imdr" / "imdr_run.json"
MINI_RUN = DATA / "mini" / "mini_run.json"

TABLE4 = [
    ("obesity", 6),
    ("alcohol", 21),
    ("education", 21),
    ("hearing", 18),
    ("smoking", 12),
    ("depression", 8),
    ("hypertension", 4),
    ("diet", 8),
    ("diabetes", 2),
]


def make_config(weights, decreasing=(), name="test"):
    specs = [
        IndicatorSpec(
            id=f"v{i}" if isinstance(w, (int, float)) else w[0],
            label=f"V{i}",
            polarity=Polarity.RISK_DECREASING if i in decreasing else Polarity.RISK_INCREASING,
            weight_percent=w if isinstance(w, (int, float)) else w[1],
        )
        for i, w in enumerate(weights)
    ]
    return IndexConfig(name, tuple(specs))


@pytest.fixture
def out_dir(tmp_path, monkeypatch):
    out = tmp_path / "out"
    monkeypatch.setenv("RISKINDEX_OUTPUT_DIR", str(out))
    return out


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
