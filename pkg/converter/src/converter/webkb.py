"""Convert raw WebKB files plus the published ten 60/20/20 splits.

Raw layout (one dataset per directory, name inferred from the split files):
    out1_graph_edges.txt            header line, then "src<TAB>dst"
    out1_node_feature_label.txt     header line, then
                                    "id<TAB>f1,f2,...<TAB>label"
    <name>_split_0.6_0.2_<i>.npz    i = 0..9; boolean/0-1 arrays under
                                    train_mask / val_mask / test_mask
"""

from __future__ import annotations

import glob
import os
import re

import numpy as np

from .errors import ConvertError
from .writer import write_dataset_dir

N_FOLDS = 10


def infer_name(src: str) -> str:
    hits = sorted(glob.glob(os.path.join(src, "*_split_0.6_0.2_0.npz")))
    if len(hits) != 1:
        raise ConvertError(
            f"{src}: expected exactly one *_split_0.6_0.2_0.npz file, "
            f"found {len(hits)}")
    return re.sub(r"_split_0\.6_0\.2_0\.npz$", "",
                  os.path.basename(hits[0]))


def _read_lines(path: str) -> list[str]:
    if not os.path.isfile(path):
        raise ConvertError(f"missing file: {path}")
    with open(path) as fh:
        return [ln.rstrip("\n") for ln in fh]


def convert_webkb(src: str, out: str, name: str | None = None) -> str:
    """Read raw WebKB files from src, write a 10-fold dataset dir to out."""
    name = name or infer_name(src)

    node_lines = _read_lines(os.path.join(src, "out1_node_feature_label.txt"))
    rows: dict[int, tuple[list[float], int]] = {}
    for lineno, ln in enumerate(node_lines[1:], start=2):  # skip header
        if not ln.strip():
            continue
        parts = ln.split("\t")
        if len(parts) != 3:
            raise ConvertError(
                f"out1_node_feature_label.txt:{lineno}: expected "
                f"'id<TAB>features<TAB>label'")
        try:
            nid = int(parts[0])
            feats = [float(t) for t in parts[1].split(",")]
            label = int(parts[2])
        except ValueError as exc:
            raise ConvertError(
                f"out1_node_feature_label.txt:{lineno}: {exc}") from exc
        if nid in rows:
            raise ConvertError(
                f"out1_node_feature_label.txt:{lineno}: duplicate node {nid}")
        rows[nid] = (feats, label)
    if not rows:
        raise ConvertError("out1_node_feature_label.txt: no node rows")
    n = max(rows) + 1
    if sorted(rows) != list(range(n)):
        raise ConvertError("node ids are not contiguous from 0")
    f = len(rows[0][0])
    features = np.zeros((n, f))
    labels = np.zeros(n, dtype=np.int64)
    for nid, (feats, label) in rows.items():
        if len(feats) != f:
            raise ConvertError(f"node {nid}: {len(feats)} features, "
                               f"expected {f}")
        features[nid] = feats
        labels[nid] = label
    n_classes = int(labels.max()) + 1

    edge_lines = _read_lines(os.path.join(src, "out1_graph_edges.txt"))
    edges = []
    for lineno, ln in enumerate(edge_lines[1:], start=2):  # skip header
        if not ln.strip():
            continue
        parts = ln.split()
        if len(parts) != 2:
            raise ConvertError(f"out1_graph_edges.txt:{lineno}: expected "
                               f"'src dst'")
        s, d = int(parts[0]), int(parts[1])
        if not (0 <= s < n and 0 <= d < n):
            raise ConvertError(f"out1_graph_edges.txt:{lineno}: edge "
                               f"({s},{d}) out of range for n_nodes={n}")
        edges.append((s, d))

    folds = []
    for i in range(N_FOLDS):
        path = os.path.join(src, f"{name}_split_0.6_0.2_{i}.npz")
        if not os.path.isfile(path):
            raise ConvertError(f"missing file: {path}")
        with np.load(path) as z:
            for key in ("train_mask", "val_mask", "test_mask"):
                if key not in z:
                    raise ConvertError(f"{path}: missing array {key!r}")
            train = np.asarray(z["train_mask"], dtype=bool)
            val = np.asarray(z["val_mask"], dtype=bool)
            test = np.asarray(z["test_mask"], dtype=bool)
        for nm, arr in (("train", train), ("val", val), ("test", test)):
            if arr.shape != (n,):
                raise ConvertError(f"{path}: {nm}_mask length {arr.shape}, "
                                   f"expected ({n},)")
        counts = train.astype(int) + val.astype(int) + test.astype(int)
        bad = np.flatnonzero(counts != 1)
        if len(bad):
            raise ConvertError(
                f"{path}: nodes {bad[:20].tolist()} are not in exactly one "
                f"of train/val/test")
        tokens = np.where(train, "train", np.where(val, "val", "test"))
        folds.append(tokens.tolist())

    return write_dataset_dir(out, name=name, features=features,
                             labels=labels, edges=edges, n_classes=n_classes,
                             folds=folds)
