import csv
import math

import pytest

from riskindex import fixtures, pipeline

from conftest import DATA, IMDR_RUN


@pytest.mark.parametrize("sub, make", [("imdr", fixtures.imdr_files), ("mini", fixtures.mini_files)])
def test_bundled_data_regenerates_byte_identical(sub, make):
    files = make()
    for rel, text in files.items():
        assert (DATA / sub / rel).read_text(encoding="utf-8") == text, rel
    on_disk = {p.relative_to(DATA / sub).as_posix() for p in (DATA / sub).rglob("*") if p.is_file()}
    assert on_disk == set(files)


def test_generator_shape():
    data = fixtures.generate()
    assert len(data["codes"]) == 207
    assert sum(data["london"]) == 32
    assert data["codes"][0] == "E38000001"


def test_generator_is_seeded():
    a = fixtures.generate()
    b = fixtures.generate()
    assert a["codes"] == b["codes"]
    assert all(a["rates"][k] == b["rates"][k] for k in a["rates"])


def test_oracle_tools_agree_by_hand():
    assert fixtures.oracle_pearson([1, 2, 3, 4, 5], [2, 1, 4, 3, 6]) == pytest.approx(10 / math.sqrt(148), abs=1e-15)
    assert fixtures.oracle_residuals([2.0, 4.0, 6.0], [1.0, 2.0, 3.0]) == pytest.approx([0, 0, 0], abs=1e-15)
    uw, w = fixtures.oracle_index([[0.0, 2.0], [5.0, 1.0]], [75, 25], [False, True])
    assert uw == [0.0, 1.0] and w == [0.0, 1.0]


def test_boundary_harmonisation_recovers_counts():
    # the old-boundary hearing counts merge back into exactly the 207 current areas
    run = pipeline.load_run_config(IMDR_RUN)
    rates = pipeline.load_input(run.inputs["hearing"])
    assert len(rates) == 207
    with open(DATA / "imdr" / "indicators" / "hearing_counts_2013.csv", newline="") as fh:
        old = list(csv.DictReader(fh))
    assert len(old) == 207 + sum(fixtures.ACCRETIONS.values()) - len(fixtures.ACCRETIONS)
    assert all(0 < v < 100 for v in rates.values())
