#!/usr/bin/env python3
"""Run the measurement ladder and print scaling ratios.

Usage: python scripts/run_bench.py [--sizes 1,2,4,8,16,32] [--out report.json]

Runs each tool over the size ladder (median of three runs per point, RSS
sampled at 10 ms) and prints per-tool consecutive-size time ratios; linear
scaling shows up as ratios near 2.0.
"""

import argparse
import sys
from pathlib import Path

from xmlbind.bench import run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="1,2,4,8,16,32", help="MiB, comma-separated")
    ap.add_argument("--out", default="bench_report.json")
    ap.add_argument("--runs", type=int, default=3)
    args = ap.parse_args()

    sizes = [float(s) for s in args.sizes.split(",")]
    tools = ["sax_scan", "dom_parse", "generated_parse"]
    report = run_suite(tools, sizes, runs=args.runs)
    sys.stdout.write(report.to_tsv())

    print()
    for tool in tools:
        times = [report.row(tool, int(s * 1024 * 1024)).median_seconds for s in sorted(sizes)]
        ratios = [b / a for a, b in zip(times, times[1:])]
        pretty = " ".join(f"{r:.2f}" for r in ratios)
        print(f"{tool:16s} consecutive-size time ratios: {pretty}")

    Path(args.out).write_text(report.to_json())
    print(f"\nreport written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
