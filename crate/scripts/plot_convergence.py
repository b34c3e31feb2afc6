#!/usr/bin/env python3
"""Render convergence curves from sgdlab CSV output.

Reads the CSV emitted by `sgdlab run` / `sgdlab sweep` (aggregate rows) and
plots the measured composite against the theoretical bound, log-log in the
horizon. One curve per schedule family.

Usage:
    python3 scripts/plot_convergence.py results.csv [-o curves.png]

Plotting happens strictly out of process: the CLI only ever writes CSV.
"""

import argparse
import csv
import sys
from collections import defaultdict


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv_path", help="CSV produced by `sgdlab run` or `sgdlab sweep`")
    parser.add_argument("-o", "--out", default="convergence.png", help="output image path")
    args = parser.parse_args()

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib is required: pip install matplotlib", file=sys.stderr)
        return 1

    # schedule -> sorted list of (T, composite, theorem_min); aggregate rows
    # only (replicate rows repeat the master seed in the aggregate row, so we
    # keep the last row per (schedule, T), which is always the aggregate).
    cells = {}
    with open(args.csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["schedule"], int(row["T"]))
            cells[key] = (float(row["composite"]), float(row["theorem_min"]))

    by_schedule = defaultdict(list)
    for (schedule, horizon), (composite, bound) in sorted(cells.items()):
        by_schedule[schedule].append((horizon, composite, bound))

    if not by_schedule:
        print("no rows found", file=sys.stderr)
        return 1

    fig, ax = plt.subplots(figsize=(7, 5))
    for schedule, points in sorted(by_schedule.items()):
        points.sort()
        ts = [p[0] for p in points]
        measured = [p[1] for p in points]
        bounds = [p[2] for p in points]
        (line,) = ax.plot(ts, measured, "o-", label=f"{schedule} (measured)")
        ax.plot(ts, bounds, "--", color=line.get_color(), label=f"{schedule} (bound)")

    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("horizon T")
    ax.set_ylabel("composite error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
