#!/usr/bin/env python3
"""Run all three figure experiments and drop their tables under one directory.

Usage:
    python scripts/run_figures.py --out results/ [--seed 7] [--noise]
"""

import argparse
from dataclasses import replace

from nmrwitness.harness import DEFAULT_NOISE_LEVEL, ExperimentConfig, run_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--noise", action="store_true",
                        help="inject preparation noise at the calibrated level")
    parser.add_argument("--pulse-level", action="store_true")
    args = parser.parse_args()

    base = ExperimentConfig(
        seed=args.seed,
        noise_level=DEFAULT_NOISE_LEVEL if args.noise else None,
        pulse_level=args.pulse_level,
    )
    for name in ("fig2", "fig3", "fig4"):
        config = replace(base, experiment=name, out_dir=f"{args.out}/{name}")
        report = run_experiment(config)
        print(f"{name}: wrote {sorted(report.files)} in {report.elapsed_s:.2f} s")


if __name__ == "__main__":
    main()
