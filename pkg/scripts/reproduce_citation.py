#!/usr/bin/env python3
"""Citation-benchmark table: all four families on Cora/CiteSeer/PubMed.

Writes one summary.csv per (dataset, family) under --out-root.
"""
import argparse
import os
import sys

from polyfilter.cli import main as cli_main

FAMILIES = ["chebyshev", "laguerre", "meixner", "krawtchouk"]
DATASETS = ["cora", "citeseer", "pubmed"]


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data-root", default="data")
    ap.add_argument("--out-root", default="results/citation")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    for name in DATASETS:
        for family in FAMILIES:
            out = os.path.join(args.out_root, name, family)
            code = cli_main([
                "train",
                "--dataset", os.path.join(args.data_root, name),
                "--family", family,
                "--epochs", "200",
                "--seed", str(args.seed),
                "--out", out,
            ])
            if code != 0:
                return code
            print(f"wrote {out}/summary.csv")
    return 0


if __name__ == "__main__":
    sys.exit(run())
