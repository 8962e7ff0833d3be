#!/usr/bin/env python3
"""Run every bundled study config into an output directory.

Usage:
    python scripts/run_all_studies.py [--out studies-out] [--threads N]

Each study writes CSV (and for some kinds JSON / binary) reports; running
the script twice into two directories and diffing them is the determinism
check the test suite automates.
"""

import argparse
import sys
from pathlib import Path

from tfnorms.cli import main as cli_main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def run(out_dir: str, threads: int) -> int:
    worst = 0
    for cfg in sorted(CONFIG_DIR.glob("*.json")):
        code = cli_main(["run", str(cfg), "--out", out_dir, "--threads", str(threads)])
        print(f"{cfg.name}: exit {code}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="studies-out")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    sys.exit(run(args.out, args.threads))
