"""Command-line interface.

Subcommands: simulate, analyze, audit, extrapolate, reproduce.
Exit codes: 0 success, 2 scenario parse/validation error, 3 analysis
degeneracy.
"""

import argparse
import csv
import sys
from pathlib import Path

from . import pipeline, tagio
from .errors import DegenerateInputError, ScenarioParseError, ValidationError
from .scenario import PRESET_NAMES, load_scenario

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_DEGENERATE = 3


def _add_scenario_arg(parser):
    parser.add_argument(
        "--scenario", required=True,
        help=f"scenario file path or preset name ({', '.join(PRESET_NAMES)})",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spdclink",
        description="Simulate and analyze phase scans of two distant photon-pair sources.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize tag streams and fringe traces")
    _add_scenario_arg(p)
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=("binary", "csv"), default="binary",
                   help="tag stream file format")

    p = sub.add_parser("analyze", help="run the fringe statistics pipeline on traces")
    _add_scenario_arg(p)
    p.add_argument("--run", required=True, help="directory written by simulate")
    p.add_argument("--out", default=None, help="report directory (default: the run dir)")
    p.add_argument("--samples", type=int, default=100_000,
                   help="Monte-Carlo resampling draws")
    p.add_argument("--seed", type=int, default=0, help="Monte-Carlo seed")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    p = sub.add_parser("audit", help="tabulate beam and coherence numbers")
    _add_scenario_arg(p)
    p.add_argument("--out", default=None, help="directory for audit.json/audit.csv")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("extrapolate", help="fit visibility vs distance over reports")
    p.add_argument("--reports", nargs="+", required=True,
                   help="two or more report.json files from analyze")
    p.add_argument("--out", default=None, help="directory for extrapolation.json")

    p = sub.add_parser("reproduce", help="run all presets and emit the comparison table")
    p.add_argument("--out", required=True, help="output root directory")
    p.add_argument("--seed", type=int, default=None, help="override preset seeds")
    p.add_argument("--ensemble", type=int, default=20,
                   help="runs per preset for ensemble statistics")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--format", choices=("binary", "csv"), default="binary",
                   help="tag stream file format")
    p.add_argument("--no-figures", action="store_true")
    return parser


def _flatten_audit(audit):
    for section in ("beams", "coherence", "counting"):
        for key, value in audit[section].items():
            yield f"{section}.{key}", value


def _cmd_simulate(args):
    scenario = load_scenario(args.scenario)
    paths = pipeline.run_simulate(scenario, args.out, seed=args.seed,
                                  tag_format=args.format)
    for kind, path in sorted(paths.items()):
        print(f"{kind}: {path}")
    return EXIT_OK


def _cmd_analyze(args):
    scenario = load_scenario(args.scenario)
    out_dir = args.out if args.out is not None else args.run
    report = pipeline.run_analyze(
        scenario, run_dir=Path(args.run), out_dir=out_dir,
        n_samples=args.samples, mc_seed=args.seed,
        figures=not args.no_figures,
    )
    degenerate = False
    for kind, section in report["traces"].items():
        if section.get("degenerate"):
            print(f"{kind}: degenerate trace (no extrema)")
            degenerate = True
        else:
            print(
                f"{kind}: V = {100 * section['mc_visibility_mean']:.2f}% "
                f"± {100 * section['mc_visibility_std']:.2f}% "
                f"(shot-noise bound ± {100 * section['shot_noise_sigma']:.2f}%)"
            )
    print(f"report: {Path(out_dir) / 'report.json'}")
    return EXIT_DEGENERATE if degenerate else EXIT_OK


def _cmd_audit(args):
    scenario = load_scenario(args.scenario)
    audit = pipeline.run_audit(scenario)
    for key, value in _flatten_audit(audit):
        print(f"{key:<40} {value}")
    for row in audit["comparison"]:
        print(
            f"reference {row['quantity']:<28} computed {row['computed']:.6g} "
            f"vs {row['reference']:.6g}"
        )
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.format == "json":
            tagio.write_json(out_dir / "audit.json", audit)
        else:
            with open(out_dir / "audit.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["quantity", "value"])
                for key, value in _flatten_audit(audit):
                    writer.writerow([key, value])
    return EXIT_OK


def _cmd_extrapolate(args):
    result = pipeline.extrapolate_reports(args.reports)
    print(
        "V(250 m) = {:.1f}%  V(500 m) = {:.1f}%".format(
            100 * result["visibility_at_250m"], 100 * result["visibility_at_500m"]
        )
    )
    for vis, key in ((50, "distance_at_50pct_m"), (10, "distance_at_10pct_m")):
        d = result[key]
        print(f"distance at {vis}% visibility: "
              + ("unbounded (flat fit)" if d is None else f"{d:.0f} m"))
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        tagio.write_json(out_dir / "extrapolation.json", result)
    return EXIT_OK


def _cmd_reproduce(args):
    summary = pipeline.run_reproduce(
        args.out, seed=args.seed, ensemble=args.ensemble,
        n_samples=args.samples, figures=not args.no_figures,
        tag_format=args.format,
    )
    print(pipeline.format_comparison_table(summary))
    print(f"full report: {Path(args.out) / 'reproduce_report.json'}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "analyze": _cmd_analyze,
    "audit": _cmd_audit,
    "extrapolate": _cmd_extrapolate,
    "reproduce": _cmd_reproduce,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ScenarioParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DegenerateInputError as exc:
        print(f"degenerate analysis: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
