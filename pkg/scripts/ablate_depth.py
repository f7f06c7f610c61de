#!/usr/bin/env python3
"""Over-smoothing ablation: accuracy vs polynomial degree K on one dataset.

Produces k_ablation.csv with one row per (K, family); feed it to the
converter package's ``plot`` command for the line chart.
"""
import argparse
import os
import sys

from polyfilter.cli import main as cli_main


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data-root", default="data")
    ap.add_argument("--dataset", default="pubmed")
    ap.add_argument("--ks", default="2,3,5,7,10")
    ap.add_argument("--out-root", default="results/depth")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    out = os.path.join(args.out_root, args.dataset)
    code = cli_main([
        "ablate-k",
        "--dataset", os.path.join(args.data_root, args.dataset),
        "--family", "chebyshev", "--family", "laguerre",
        "--family", "meixner", "--family", "krawtchouk",
        "--ks", args.ks,
        "--epochs", "200",
        "--seed", str(args.seed),
        "--out", out,
    ])
    if code == 0:
        print(f"wrote {out}/k_ablation.csv")
    return code


if __name__ == "__main__":
    sys.exit(run())
