#!/usr/bin/env python3
"""Learned Laguerre shape parameter per dataset -> learned_alpha.csv."""
import argparse
import os
import sys

from polyfilter.cli import main as cli_main

DATASETS = ["cora", "citeseer", "pubmed", "texas", "cornell"]


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data-root", default="data")
    ap.add_argument("--out", default="results/alpha")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    cmd = ["report-alpha"]
    for name in DATASETS:
        cmd += ["--dataset", os.path.join(args.data_root, name)]
    cmd += ["--seed", str(args.seed), "--out", args.out]
    code = cli_main(cmd)
    if code == 0:
        print(f"wrote {args.out}/learned_alpha.csv")
    return code


if __name__ == "__main__":
    sys.exit(run())
