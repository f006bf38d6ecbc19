"""Reproduce all four benchmark tables and write the CSV reports.

Usage: python scripts/run_tables.py [outdir] [--oracle] [--jobs N]
"""

import argparse
import pathlib
import sys

from oscrep.cli import main as cli_main


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", nargs="?", default="reports")
    ap.add_argument("--oracle", action="store_true",
                    help="add direct-integration columns (slower)")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    worst = 0
    for table in (1, 2, 3, 4):
        out = outdir / f"table{table}.csv"
        cli_args = ["--jobs", str(args.jobs), "table", str(table),
                    "--out", str(out)]
        if args.oracle:
            cli_args.append("--oracle")
        print(f"table {table} -> {out}", file=sys.stderr)
        worst = max(worst, cli_main(cli_args))
    return worst


if __name__ == "__main__":
    sys.exit(run())
