import json
import os

import numpy as np
import pytest

HERE = os.path.dirname(__file__)
TOY2 = os.path.join(HERE, "data", "toy2")

# real datasets (produced by the converter) are looked up here; the tests that
# need them skip when absent
DATA_ROOT = os.environ.get("POLYFILTER_DATA",
                           os.path.join(os.path.dirname(HERE), "data"))


@pytest.fixture
def toy2_path():
    return TOY2


def dataset_dir(name: str) -> str:
    return os.path.join(DATA_ROOT, name)


def require_dataset(name: str) -> str:
    path = dataset_dir(name)
    if not os.path.isfile(os.path.join(path, "meta.json")):
        pytest.skip(
            f"dataset {name!r} not present at {path}; fetch the raw files and "
            f"run the converter (see README) to enable this check")
    return path


def write_dataset(path, features, labels, edges, n_classes, masks=None,
                  folds=None):
    """Materialize a dataset directory in the portable on-disk format."""
    os.makedirs(path, exist_ok=True)
    n, f = np.asarray(features).shape
    meta = {
        "name": os.path.basename(str(path)),
        "n_nodes": n,
        "n_features": f,
        "n_classes": n_classes,
        "split_kind": "folds10" if folds is not None else "single",
    }
    with open(os.path.join(path, "meta.json"), "w") as fh:
        json.dump(meta, fh)
    with open(os.path.join(path, "edges.csv"), "w") as fh:
        for s, d in edges:
            fh.write(f"{s},{d}\n")
    with open(os.path.join(path, "features.csv"), "w") as fh:
        for row in np.asarray(features):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    with open(os.path.join(path, "labels.csv"), "w") as fh:
        for v in labels:
            fh.write(f"{int(v)}\n")
    if folds is not None:
        os.makedirs(os.path.join(path, "folds"), exist_ok=True)
        for i, tokens in enumerate(folds):
            with open(os.path.join(path, "folds", f"fold_{i}.csv"), "w") as fh:
                fh.write("\n".join(tokens) + "\n")
    else:
        with open(os.path.join(path, "masks.csv"), "w") as fh:
            fh.write("\n".join(masks) + "\n")
    return str(path)
