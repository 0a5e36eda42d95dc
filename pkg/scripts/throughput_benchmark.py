#!/usr/bin/env python3
"""Throughput comparison across schemes and codec parameters.

Runs the standard six-point grid (c in {2, 3} x block size in {16, 34, 250})
for the keyless codec and a k-sweep for every scheme, then writes CSV/JSON
result tables.  Defaults are sized for a quick local run; raise --payload-mb
to 100 to reproduce the full measurement.

Usage: python scripts/throughput_benchmark.py [--payload-mb 16] [--out results]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from kfrag.baselines import SchemeId
from kfrag.bench import DEFAULT_GRID, BenchConfig, emit_results, run_bench


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", type=Path)
    parser.add_argument("--payload-mb", default=16, type=int)
    parser.add_argument("--reps", default=3, type=int)
    parser.add_argument("--seed", default=0, type=int)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    print(f"block-size grid, proposed scheme, {args.payload_mb} MB payload")
    grid_results = run_bench(
        BenchConfig(
            schemes=[SchemeId.PROPOSED],
            payload_mb=args.payload_mb,
            repetitions=args.reps,
            grid=list(DEFAULT_GRID),
            seed=args.seed,
        )
    )
    print(emit_results(grid_results, csv_path=args.out / "grid_proposed.csv",
                       json_path=args.out / "grid_proposed.json"))

    print("k-sweep, all schemes")
    sweep_results = run_bench(
        BenchConfig(
            schemes=list(SchemeId),
            payload_mb=args.payload_mb,
            repetitions=args.reps,
            grid=[(2, 2, 250), (4, 2, 250), (8, 2, 250)],
            seed=args.seed,
        )
    )
    print(emit_results(sweep_results, csv_path=args.out / "k_sweep_all.csv",
                       json_path=args.out / "k_sweep_all.json"))
    print(f"tables written to {args.out}/")


if __name__ == "__main__":
    main()
