"""Command-line entry point: render figures from a run directory."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from vbgk_plots.figures import FIGURES, PlotDataError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vbgk-plot",
        description="Render figures from a solver run directory (read-only).",
    )
    parser.add_argument("--run-dir", required=True)
    parser.add_argument("--figure", required=True,
                        choices=sorted(FIGURES) + ["all"])
    parser.add_argument("--out", default=None,
                        help="output image path (default: <figure>.png in the "
                             "current directory); with --figure all this is "
                             "an output directory")
    parser.add_argument("--format", default="png", choices=("png", "svg"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    run_dir = Path(args.run_dir)
    names = sorted(FIGURES) if args.figure == "all" else [args.figure]
    failed = 0
    for name in names:
        try:
            fig = render(run_dir, name)
        except PlotDataError as exc:
            print(f"{name}: {exc}", file=sys.stderr)
            failed += 1
            continue
        if args.figure == "all":
            outdir = Path(args.out) if args.out else Path.cwd()
            outdir.mkdir(parents=True, exist_ok=True)
            out = outdir / f"{name}.{args.format}"
        else:
            out = Path(args.out) if args.out else Path(f"{name}.{args.format}")
        fig.savefig(out, dpi=150)
        print(out)
    # with --figure all, missing optional inputs are fine as long as
    # something rendered
    if args.figure == "all":
        return 0 if failed < len(names) else 1
    return 0 if failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
