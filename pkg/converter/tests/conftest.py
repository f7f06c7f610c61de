import os
import pickle

import numpy as np
import pytest
import scipy.sparse as sp


def make_planetoid_raw(path, name="tiny", gaps=False):
    """Tiny raw Planetoid directory.

    Layout: 5 non-test nodes (allx) followed by 3 test nodes; the first 2
    nodes are the labeled training block (x/y); 1 validation node. With
    gaps=True the test block spans 4 ids and one of them is absent from
    test.index (the CiteSeer quirk).
    """
    os.makedirs(path, exist_ok=True)
    rng = np.random.default_rng(0)
    f, n_classes = 4, 2
    n_allx = 5
    allx = sp.csr_matrix(np.abs(rng.standard_normal((n_allx, f))))
    ally = np.eye(n_classes)[rng.integers(0, n_classes, n_allx)]
    n_train = 2
    x = allx[:n_train]
    y = ally[:n_train]
    if gaps:
        # ids 5..8 with 7 missing from test.index
        test_idx = [6, 5, 8]
    else:
        test_idx = [6, 5, 7]  # deliberately shuffled
    tx = sp.csr_matrix(np.abs(rng.standard_normal((len(test_idx), f))))
    ty = np.eye(n_classes)[rng.integers(0, n_classes, len(test_idx))]
    n = n_allx + (max(test_idx) - min(test_idx) + 1)
    graph = {i: [(i + 1) % n, (i + 2) % n] for i in range(n)}

    blobs = {"x": x, "y": y, "tx": tx, "ty": ty,
             "allx": allx, "ally": ally, "graph": graph}
    for part, obj in blobs.items():
        with open(os.path.join(path, f"ind.{name}.{part}"), "wb") as fh:
            pickle.dump(obj, fh)
    with open(os.path.join(path, f"ind.{name}.test.index"), "w") as fh:
        fh.write("\n".join(str(i) for i in test_idx) + "\n")
    return str(path)


def make_webkb_raw(path, name="tinyweb", n=6, f=4, n_classes=3):
    os.makedirs(path, exist_ok=True)
    rng = np.random.default_rng(1)
    with open(os.path.join(path, "out1_node_feature_label.txt"), "w") as fh:
        fh.write("node_id\tfeature\tlabel\n")
        for i in range(n):
            feats = ",".join(str(int(v)) for v in rng.integers(0, 2, f))
            fh.write(f"{i}\t{feats}\t{int(rng.integers(0, n_classes))}\n")
    with open(os.path.join(path, "out1_graph_edges.txt"), "w") as fh:
        fh.write("node_id\tnode_id\n")
        for i in range(n):
            fh.write(f"{i}\t{(i + 1) % n}\n")
    for i in range(10):
        perm = rng.permutation(n)
        train = np.zeros(n, dtype=bool)
        val = np.zeros(n, dtype=bool)
        test = np.zeros(n, dtype=bool)
        train[perm[: n - 4]] = True
        val[perm[n - 4: n - 2]] = True
        test[perm[n - 2:]] = True
        np.savez(os.path.join(path, f"{name}_split_0.6_0.2_{i}.npz"),
                 train_mask=train, val_mask=val, test_mask=test)
    return str(path)


@pytest.fixture
def planetoid_raw(tmp_path):
    return make_planetoid_raw(tmp_path / "raw")


@pytest.fixture
def webkb_raw(tmp_path):
    return make_webkb_raw(tmp_path / "raw")
