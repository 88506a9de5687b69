"""Run the full pipeline on the bundled 207-area IMDR fixture.

Builds the index, prints the top and bottom five areas, writes the three
validation reports (all areas, London excluded, age-controlled) and renders
maps, radar plots and the histogram.
"""

import argparse
import dataclasses
from pathlib import Path

import riskindex
from riskindex import pipeline
from riskindex.stats import Direction, format_score, rank_areas


DEFAULT_RUN = Path(riskindex.__file__).parent / "data" / "imdr" / "imdr_run.json"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=Path, default=DEFAULT_RUN)
    parser.add_argument("--out", type=Path, help="output directory (default: the config's output_dir)")
    args = parser.parse_args()

    run = pipeline.load_run_config(args.config)
    if args.out is not None:
        run = dataclasses.replace(run, output_dir=args.out)

    written = list(pipeline.build(run).values())
    _, result = pipeline.compute(run)
    names = {a.code: a.name for a in result.areas}
    ranked = rank_areas(result.weighted(), Direction.DESCENDING)
    print(f"{run.index.name}: {len(ranked)} areas")
    for label, rows in (("highest", ranked[:5]), ("lowest", ranked[-5:])):
        print(f"\n{label} weighted scores")
        for rank, code, score in rows:
            print(f"  {rank:>4}  {code}  {format_score(score, run.index.display_decimals)}  {names[code]}")

    for exclude, control in (([], None), (["london_ccgs"], None), ([], "avg_age")):
        _, text, paths = pipeline.correlate(run, exclude=exclude, control=control)
        written += paths.values()
        print()
        print(text, end="")

    paths, warnings = pipeline.render(run, do_map=True, radar=["top", "3"], histogram_bins=20)
    for w in warnings:
        print(f"warning: {w}")
    written += paths.values()
    print(f"\nwrote {len(written)} files under {run.output_dir}")


if __name__ == "__main__":
    main()
