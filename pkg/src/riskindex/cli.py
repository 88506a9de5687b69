"""Command-line front end: ``riskindex build|correlate|render|describe --config PATH``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from riskindex import pipeline
from riskindex.errors import ConfigError, RiskIndexError
from riskindex.model import normalized_weights

log = logging.getLogger("riskindex")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def cmd_build(args) -> int:
    run = pipeline.load_run_config(args.config)
    paths = pipeline.build(run)
    for name, path in paths.items():
        print(f"wrote {path}")
    return 0


def cmd_correlate(args) -> int:
    run = pipeline.load_run_config(args.config)
    report, text, paths = pipeline.correlate(run, exclude=args.exclude, control=args.control)
    sys.stdout.write(text)
    for path in paths.values():
        print(f"wrote {path}")
    return 0


def cmd_render(args) -> int:
    run = pipeline.load_run_config(args.config)
    do_map, radar, bins = args.map, args.radar, args.histogram
    if not (do_map or radar or bins is not None):
        # nothing requested: render everything the config supports
        do_map = run.render.geometry is not None
        radar = ["top", "3"]
        bins = 20
    if bins is not None and bins < 1:
        raise ConfigError("--histogram needs a positive bin count")
    paths, warnings = pipeline.render(run, do_map=do_map, radar=radar, histogram_bins=bins)
    for w in warnings:
        log.warning(w)
    for path in paths.values():
        print(f"wrote {path}")
    return 0


def cmd_describe(args) -> int:
    run = pipeline.load_run_config(args.config, check_files=False)
    weights = normalized_weights(run.index)
    lines = [f"Index: {run.index.name} ({len(run.index.indicators)} indicators)", ""]
    header = ("id", "label", "polarity", "weight %", "weight")
    rows = [
        (
            spec.id,
            spec.display_label,
            "reversed" if spec.reversed else "as-is",
            f"{spec.weight_percent:g}",
            f"{weights[spec.id]:.4g}",
        )
        for spec in run.index.indicators
    ]
    widths = [max(len(r[i]) for r in rows + [header]) for i in range(len(header))]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())

    lines += ["", "Input files:"]
    for f in run.referenced_files():
        lines.append(f"  {'ok     ' if f.exists() else 'MISSING'} {f}")
    lines += ["", "Validation measures:"]
    lines += [f"  {m.id}: {m.label}" for m in run.validation] or ["  (none)"]
    lines += ["", "Exclusion lists:"]
    lines += [f"  {name}: {len(codes)} areas" for name, codes in run.exclusions.items()] or ["  (none)"]
    lines += ["", f"Output directory: {run.output_dir}"]
    print("\n".join(lines))
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="riskindex", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="normalise, weight and score every area")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("correlate", help="validation correlation matrix")
    p.add_argument("--exclude", action="append", default=[], metavar="NAME", help="named exclusion list")
    p.add_argument("--control", metavar="MEASURE", help="validation measure id to partial out")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("render", help="maps, radar plots and histogram")
    p.add_argument("--map", action="store_true", help="weighted and unweighted choropleths plus scores.geojson")
    p.add_argument("--radar", nargs="+", metavar="SEL", help="'top N', 'bottom N' or area codes")
    p.add_argument("--histogram", type=int, metavar="BINS")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("describe", help="summarise a run config")
    p.set_defaults(func=cmd_describe)

    for p in sub.choices.values():
        p.add_argument("--config", required=True, help="run configuration JSON")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except RiskIndexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
