"""Load the portable dataset directory format into a validated DatasetBundle.

Layout (all line-oriented text):
    meta.json     {name, n_nodes, n_features, n_classes, split_kind}
    edges.csv     src,dst per line (0-based)
    features.csv  n_nodes lines of n_features comma-separated reals
    labels.csv    n_nodes lines, one integer class each
    masks.csv     (split_kind == "single") one of train|val|test|none per line
    folds/fold_0.csv ... fold_9.csv (split_kind == "folds10"), masks.csv schema
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .sparse import EdgeList


class DataError(Exception):
    """Malformed or inconsistent dataset input."""


@dataclass
class SplitMasks:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray


@dataclass
class DatasetBundle:
    name: str
    features: np.ndarray
    labels: np.ndarray
    n_classes: int
    edges: EdgeList
    split: SplitMasks | list[SplitMasks]  # list means 10 folds

    @property
    def n_nodes(self) -> int:
        return self.features.shape[0]

    @property
    def is_folds(self) -> bool:
        return isinstance(self.split, list)


_MASK_TOKENS = ("train", "val", "test", "none")


def _read_masks(path: str, n: int) -> SplitMasks:
    train = np.zeros(n, dtype=bool)
    val = np.zeros(n, dtype=bool)
    test = np.zeros(n, dtype=bool)
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() != ""]
    if len(lines) != n:
        raise DataError(f"{path}: expected {n} lines, got {len(lines)}")
    for i, tok in enumerate(lines):
        if tok not in _MASK_TOKENS:
            raise DataError(f"{path}:{i + 1}: unknown mask token {tok!r}")
        if tok == "train":
            train[i] = True
        elif tok == "val":
            val[i] = True
        elif tok == "test":
            test[i] = True
    return SplitMasks(train, val, test)


def _check_disjoint(masks: SplitMasks, where: str):
    for a, b in (("train", "val"), ("train", "test"), ("val", "test")):
        overlap = np.flatnonzero(getattr(masks, a) & getattr(masks, b))
        if len(overlap):
            raise DataError(
                f"{where}: {a}/{b} masks overlap at node indices "
                f"{overlap[:20].tolist()}")


def load_dataset(path: str) -> DatasetBundle:
    """Load, validate, and L1-row-normalize a dataset directory."""
    meta_path = os.path.join(path, "meta.json")
    if not os.path.isfile(meta_path):
        raise DataError(f"missing file: {meta_path}")
    with open(meta_path) as fh:
        try:
            meta = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{meta_path}: invalid JSON ({exc})") from exc
    for key in ("name", "n_nodes", "n_features", "n_classes", "split_kind"):
        if key not in meta:
            raise DataError(f"{meta_path}: missing key {key!r}")
    n = int(meta["n_nodes"])
    f = int(meta["n_features"])
    n_classes = int(meta["n_classes"])
    if meta["split_kind"] not in ("single", "folds10"):
        raise DataError(f"{meta_path}: bad split_kind {meta['split_kind']!r}")

    edges_path = os.path.join(path, "edges.csv")
    if not os.path.isfile(edges_path):
        raise DataError(f"missing file: {edges_path}")
    edges: list[tuple[int, int]] = []
    with open(edges_path) as fh:
        for lineno, ln in enumerate(fh, start=1):
            ln = ln.strip()
            if not ln:
                continue
            parts = ln.split(",")
            if len(parts) != 2:
                raise DataError(f"{edges_path}:{lineno}: expected 'src,dst'")
            try:
                s, d = int(parts[0]), int(parts[1])
            except ValueError:
                raise DataError(f"{edges_path}:{lineno}: non-integer index")
            if not (0 <= s < n and 0 <= d < n):
                raise DataError(f"{edges_path}:{lineno}: edge ({s},{d}) out of "
                                f"range for n_nodes={n}")
            edges.append((s, d))

    feat_path = os.path.join(path, "features.csv")
    if not os.path.isfile(feat_path):
        raise DataError(f"missing file: {feat_path}")
    try:
        features = np.loadtxt(feat_path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise DataError(f"{feat_path}: parse error ({exc})") from exc
    if features.shape != (n, f):
        raise DataError(f"{feat_path}: shape {features.shape}, expected {(n, f)}")
    bad = np.argwhere(~np.isfinite(features))
    if len(bad):
        r, c = bad[0]
        raise DataError(f"{feat_path}: non-finite feature at row {r}, col {c}")

    labels_path = os.path.join(path, "labels.csv")
    if not os.path.isfile(labels_path):
        raise DataError(f"missing file: {labels_path}")
    with open(labels_path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() != ""]
    if len(lines) != n:
        raise DataError(f"{labels_path}: expected {n} lines, got {len(lines)}")
    labels = np.zeros(n, dtype=np.int64)
    for i, tok in enumerate(lines):
        try:
            labels[i] = int(tok)
        except ValueError:
            raise DataError(f"{labels_path}:{i + 1}: non-integer label {tok!r}")
        if not (0 <= labels[i] < n_classes):
            raise DataError(f"{labels_path}:{i + 1}: label {labels[i]} out of "
                            f"range for n_classes={n_classes}")

    if meta["split_kind"] == "single":
        masks_path = os.path.join(path, "masks.csv")
        if not os.path.isfile(masks_path):
            raise DataError(f"missing file: {masks_path}")
        split: SplitMasks | list[SplitMasks] = _read_masks(masks_path, n)
        _check_disjoint(split, masks_path)
    else:
        folds = []
        for i in range(10):
            fp = os.path.join(path, "folds", f"fold_{i}.csv")
            if not os.path.isfile(fp):
                raise DataError(f"missing fold file: {fp}")
            m = _read_masks(fp, n)
            _check_disjoint(m, fp)
            folds.append(m)
        split = folds

    # Planetoid-style preprocessing: unit L1 row sum where the row is nonzero
    rowsum = np.abs(features).sum(axis=1, keepdims=True)
    nzrows = rowsum[:, 0] > 0
    features = features.copy()
    features[nzrows] /= rowsum[nzrows]

    return DatasetBundle(
        name=str(meta["name"]),
        features=features,
        labels=labels,
        n_classes=n_classes,
        edges=EdgeList(n, edges),
        split=split,
    )


def validate_bundle(b: DatasetBundle) -> list[str]:
    """Human-readable invariant violations; empty list means a clean bundle."""
    out: list[str] = []
    n = b.features.shape[0]
    if b.labels.shape != (n,):
        out.append(f"labels length {b.labels.shape[0]} != n_nodes {n}")
    else:
        bad = np.flatnonzero((b.labels < 0) | (b.labels >= b.n_classes))
        if len(bad):
            out.append(f"labels out of range at nodes {bad[:20].tolist()}")
    if not np.all(np.isfinite(b.features)):
        out.append("features contain non-finite entries")
    if b.edges.n_nodes != n:
        out.append(f"edge list n_nodes {b.edges.n_nodes} != n_nodes {n}")
    for src, dst in b.edges.edges:
        if not (0 <= src < n and 0 <= dst < n):
            out.append(f"edge ({src},{dst}) out of range")
            break
    splits = b.split if b.is_folds else [b.split]
    if b.is_folds and len(splits) != 10:
        out.append(f"expected 10 folds, got {len(splits)}")
    for i, m in enumerate(splits):
        where = f"fold {i}" if b.is_folds else "split"
        for arr, nm in ((m.train, "train"), (m.val, "val"), (m.test, "test")):
            if arr.shape != (n,):
                out.append(f"{where}: {nm} mask length mismatch")
        for a, bn in (("train", "val"), ("train", "test"), ("val", "test")):
            if np.any(getattr(m, a) & getattr(m, bn)):
                out.append(f"{where}: {a}/{bn} masks overlap")
    return out
