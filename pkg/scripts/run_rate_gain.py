#!/usr/bin/env python3
"""Rate and rate gain of diversity splits relative to the coherent baseline,
over a sweep of coverage targets: results/gain.csv.

Usage: python scripts/run_rate_gain.py
"""

from pathlib import Path

from ratecov.cli import main as cli

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "results"

if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    out = OUT / "gain.csv"
    cli([
        "gain", "--config", str(ROOT / "configs" / "three_tier.json"),
        "--out", str(out),
        "--pc", "0.3,0.5,0.7,0.8,0.9,0.95",
        "--eta", "0,0.1,0.2,0.5",
    ])
    print(f"wrote {out}")
