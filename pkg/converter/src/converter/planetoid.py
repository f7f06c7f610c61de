"""Convert raw Planetoid citation files into the portable directory format.

Raw layout (one dataset per directory, name inferred from the filenames):
    ind.<name>.x           pickled scipy sparse: labeled-training features
    ind.<name>.y           pickled ndarray: one-hot labels for ind.<name>.x
    ind.<name>.tx, .ty     same pair for the test nodes
    ind.<name>.allx, .ally same pair for all non-test nodes
    ind.<name>.graph       pickled dict {node: [neighbors]}
    ind.<name>.test.index  text file, one (shuffled) test node id per line

The standard public split is materialized as mask tokens: the first
len(y) nodes train, the next 500 validate, the test.index nodes test.
CiteSeer's test.index has gaps (isolated test nodes missing from tx);
those nodes get zero feature rows, label 0, and the 'none' token.
"""

from __future__ import annotations

import glob
import os
import pickle

import numpy as np
import scipy.sparse as sp

from .errors import ConvertError
from .writer import write_dataset_dir

_PARTS = ("x", "y", "tx", "ty", "allx", "ally", "graph")
N_VAL = 500


def infer_name(src: str) -> str:
    hits = sorted(glob.glob(os.path.join(src, "ind.*.x")))
    if len(hits) != 1:
        raise ConvertError(
            f"{src}: expected exactly one ind.<name>.x file, found {len(hits)}")
    return os.path.basename(hits[0])[len("ind."):-len(".x")]


def _load_pickle(path: str):
    if not os.path.isfile(path):
        raise ConvertError(f"missing file: {path}")
    with open(path, "rb") as fh:
        try:
            return pickle.load(fh, encoding="latin1")
        except Exception as exc:
            raise ConvertError(f"{path}: unreadable pickle ({exc})") from exc


def _as_dense(obj, path: str) -> np.ndarray:
    if sp.issparse(obj):
        return np.asarray(obj.todense(), dtype=np.float64)
    arr = np.asarray(obj, dtype=np.float64)
    if arr.ndim != 2:
        raise ConvertError(f"{path}: expected a 2-D array, got ndim={arr.ndim}")
    return arr


def convert_planetoid(src: str, out: str, name: str | None = None) -> str:
    """Read raw Planetoid files from src, write a dataset directory to out."""
    name = name or infer_name(src)
    raw = {p: _load_pickle(os.path.join(src, f"ind.{name}.{p}"))
           for p in _PARTS}
    idx_path = os.path.join(src, f"ind.{name}.test.index")
    if not os.path.isfile(idx_path):
        raise ConvertError(f"missing file: {idx_path}")
    with open(idx_path) as fh:
        test_idx = [int(ln) for ln in fh if ln.strip()]
    if not test_idx:
        raise ConvertError(f"{idx_path}: empty test index")

    x = _as_dense(raw["x"], "x")
    tx = _as_dense(raw["tx"], "tx")
    allx = _as_dense(raw["allx"], "allx")
    y = np.asarray(raw["y"])
    ty = np.asarray(raw["ty"])
    ally = np.asarray(raw["ally"])
    graph = raw["graph"]

    f = allx.shape[1]
    n_classes = ally.shape[1]
    for nm, feats, hot in (("x", x, y), ("tx", tx, ty)):
        if feats.shape[1] != f:
            raise ConvertError(
                f"{nm}: {feats.shape[1]} features, expected {f}")
        if hot.shape != (feats.shape[0], n_classes):
            raise ConvertError(
                f"{nm}: label block shape {hot.shape} does not match "
                f"({feats.shape[0]}, {n_classes})")
    if ally.shape[0] != allx.shape[0]:
        raise ConvertError("allx/ally row counts differ")
    if len(test_idx) != tx.shape[0]:
        raise ConvertError(
            f"test.index has {len(test_idx)} entries but tx has "
            f"{tx.shape[0]} rows")

    # CiteSeer-style gaps: the full test block spans min..max of test.index;
    # ids absent from the file are isolated nodes with no features/labels
    sorted_idx = np.sort(test_idx)
    full_range = np.arange(sorted_idx.min(), sorted_idx.max() + 1)
    tx_full = np.zeros((len(full_range), f))
    ty_full = np.zeros((len(full_range), n_classes))
    pos = np.asarray(test_idx) - sorted_idx.min()
    tx_full[pos] = tx
    ty_full[pos] = ty

    features = np.vstack([allx, tx_full])
    onehot = np.vstack([ally, ty_full])
    n = features.shape[0]
    if sorted_idx.min() != allx.shape[0]:
        raise ConvertError(
            f"test.index starts at {sorted_idx.min()}, expected "
            f"{allx.shape[0]} (the row count of allx)")

    labels = np.argmax(onehot, axis=1)
    labeled = onehot.sum(axis=1) > 0

    edges = []
    for node in sorted(graph):
        for nb in sorted(graph[node]):
            if not (0 <= node < n and 0 <= nb < n):
                raise ConvertError(f"graph edge ({node},{nb}) out of range "
                                   f"for n_nodes={n}")
            edges.append((node, nb))

    tokens = ["none"] * n
    n_train = y.shape[0]
    if n_train > allx.shape[0]:
        raise ConvertError("training block larger than the non-test block")
    # the standard split: 500 validation nodes follow the training block,
    # never spilling into the test block (which starts at allx's row count)
    val_end = min(n_train + N_VAL, allx.shape[0])
    for i in range(n_train):
        tokens[i] = "train"
    for i in range(n_train, val_end):
        tokens[i] = "val"
    for i in test_idx:
        if tokens[i] != "none":
            raise ConvertError(f"test node {i} collides with train/val split")
        tokens[i] = "test" if labeled[i] else "none"

    return write_dataset_dir(out, name=name, features=features,
                             labels=labels, edges=edges, n_classes=n_classes,
                             masks=tokens)
