"""Run the four benchmark convergence studies and print their tables.

Smooth square problem at m = 3 and 4 (expected order 1 in the broken H^m
seminorm, order 2 in the lower norms), then the corner singularity on the
L-shaped domain (expected order 1/2 in the broken H^m seminorm).  CSVs go
next to the tables when --csv-dir is given.
"""

import argparse
import os
import sys
import time

from hmfem.reports import ExperimentConfig, report_markdown, run_convergence

STUDIES = [
    ("square, m=3", 1, 3, [4, 8, 16, 32, 64]),
    ("square, m=4", 1, 4, [4, 8, 16, 32, 64]),
    ("corner, m=3", 2, 3, [4, 8, 16, 32, 64]),
    ("corner, m=4", 2, 4, [4, 8, 16, 32]),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--csv-dir", help="directory for CSV copies")
    args = parser.parse_args()
    if args.csv_dir:
        os.makedirs(args.csv_dir, exist_ok=True)
    for name, example, m, levels in STUDIES:
        csv_path = None
        if args.csv_dir:
            slug = name.replace(", ", "_").replace("=", "")
            csv_path = os.path.join(args.csv_dir, f"{slug}.csv")
        config = ExperimentConfig(example=example, m=m, levels=levels,
                                  csv_path=csv_path)
        start = time.perf_counter()
        report = run_convergence(config)
        elapsed = time.perf_counter() - start
        print(f"## {name}  ({elapsed:.1f}s)")
        print(report_markdown(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
