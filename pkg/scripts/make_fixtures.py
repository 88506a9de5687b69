"""Regenerate the bundled reference datasets under src/riskindex/data."""

import argparse
from pathlib import Path

from riskindex import fixtures

DEFAULT_ROOT = Path(__file__).resolve().parents[1] / "src" / "riskindex" / "data"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", type=Path, default=DEFAULT_ROOT)
    args = parser.parse_args()
    written = fixtures.write_all(args.root)
    oracle = fixtures.oracle_report(fixtures.generate())
    print(f"wrote {len(written)} files under {args.root}")
    print(f"weighted vs unweighted r = {oracle['weighted_vs_unweighted']:.4f}")


if __name__ == "__main__":
    main()
