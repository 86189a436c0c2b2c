#!/usr/bin/env python3
"""Coverage probability curves of the three-tier scenario for several
bandwidth splits, plus a Monte Carlo validation run: one CSV per split and
one validation CSV, under results/.

Usage: python scripts/run_coverage_curves.py [--trials 100000] [--jobs 2]
"""

import argparse
from pathlib import Path

from ratecov.cli import main as cli

ROOT = Path(__file__).resolve().parents[1]
CONFIG = ROOT / "configs" / "three_tier.json"
OUT = ROOT / "results"

ETAS = [0.0, 0.1, 0.2, 0.5]


def run(trials: int, jobs: int) -> None:
    OUT.mkdir(exist_ok=True)
    for eta in ETAS:
        out = OUT / f"coverage_eta{eta:g}.csv"
        cli([
            "coverage", "--config", str(CONFIG), "--out", str(out),
            "--eta", str(eta), "--tau-min", "0", "--tau-max", "12000000",
            "--points", "40", "--methods", "exact,indep,coherent",
        ])
        print(f"wrote {out}")
    out = OUT / "validate_eta0.2.csv"
    cli([
        "validate", "--config", str(CONFIG), "--out", str(out),
        "--eta", "0.2", "--tau-min", "500000", "--tau-max", "10000000",
        "--points", "12", "--trials", str(trials), "--seed", "7",
        "--jobs", str(jobs),
    ])
    print(f"wrote {out}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--jobs", type=int, default=2)
    args = ap.parse_args()
    run(args.trials, args.jobs)
