"""Emit the portable dataset directory format.

Layout (all line-oriented text, consumed by the engine's load_dataset):
    meta.json     {name, n_nodes, n_features, n_classes, split_kind}
    edges.csv     src,dst per line (0-based)
    features.csv  n_nodes lines of comma-separated reals
    labels.csv    n_nodes lines, one integer class each
    masks.csv     one of train|val|test|none per line (single split)
    folds/fold_0.csv ... fold_9.csv (10-fold splits, masks.csv schema)

Output is deterministic: identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import os

import numpy as np


def _fmt(v: float) -> str:
    # repr of a float is the shortest round-trip form, so reruns are
    # byte-identical and the reader recovers the exact value
    return repr(float(v))


def write_dataset_dir(out: str, *, name: str, features: np.ndarray,
                      labels: np.ndarray, edges: list[tuple[int, int]],
                      n_classes: int, masks: list[str] | None = None,
                      folds: list[list[str]] | None = None) -> str:
    if (masks is None) == (folds is None):
        raise ValueError("exactly one of masks/folds must be given")
    features = np.asarray(features, dtype=np.float64)
    n, f = features.shape
    os.makedirs(out, exist_ok=True)

    meta = {
        "name": name,
        "n_nodes": n,
        "n_features": f,
        "n_classes": int(n_classes),
        "split_kind": "single" if folds is None else "folds10",
    }
    with open(os.path.join(out, "meta.json"), "w") as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)
        fh.write("\n")

    with open(os.path.join(out, "edges.csv"), "w") as fh:
        for s, d in edges:
            fh.write(f"{int(s)},{int(d)}\n")

    with open(os.path.join(out, "features.csv"), "w") as fh:
        for row in features:
            fh.write(",".join(_fmt(v) for v in row) + "\n")

    with open(os.path.join(out, "labels.csv"), "w") as fh:
        for v in labels:
            fh.write(f"{int(v)}\n")

    if folds is None:
        with open(os.path.join(out, "masks.csv"), "w") as fh:
            fh.write("\n".join(masks) + "\n")
    else:
        fold_dir = os.path.join(out, "folds")
        os.makedirs(fold_dir, exist_ok=True)
        for i, tokens in enumerate(folds):
            with open(os.path.join(fold_dir, f"fold_{i}.csv"), "w") as fh:
                fh.write("\n".join(tokens) + "\n")
    return out
