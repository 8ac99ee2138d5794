"""Narrate one series and print the text plus the run report.

Usage: python scripts/demo_narrate.py [path] [--format csv|trends_csv|json]

Defaults to the bundled weekly interest fixture.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from serinarr.cli import RunConfig, run

FIXTURE = Path(__file__).resolve().parents[1] / "tests" / "data" / "concert_weekly.csv"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("path", nargs="?", default=str(FIXTURE))
    ap.add_argument("--format", default=None,
                    help="input format; guessed as trends_csv for the fixture")
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--verbosity", type=int, default=5)
    ap.add_argument("--out-dir", default="out")
    args = ap.parse_args()

    fmt = args.format or ("trends_csv" if args.path == str(FIXTURE) else "csv")
    cfg = RunConfig(
        input=args.path,
        format=fmt,
        levels=args.levels,
        verbosity=args.verbosity,
        out_dir=args.out_dir,
        emit=("text", "json", "svg", "heatmap"),
    )
    report = run(cfg)
    print(report.narration)
    print()
    for line in report.lines():
        print(line)


if __name__ == "__main__":
    main()
