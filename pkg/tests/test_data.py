import numpy as np
import pytest

from polyfilter.data import DataError, load_dataset, validate_bundle
from conftest import write_dataset


class TestLoadDataset:
    def test_toy2_fixture(self, toy2_path):
        b = load_dataset(toy2_path)
        assert b.name == "toy2"
        assert b.n_nodes == 2
        assert b.features.shape == (2, 2)
        assert b.n_classes == 2
        assert not b.is_folds
        assert b.split.train.tolist() == [True, False]
        assert b.split.test.tolist() == [False, True]

    def test_row_l1_normalization(self, tmp_path):
        path = write_dataset(tmp_path / "d", [[2.0, 2.0], [0.0, 0.0]],
                             [0, 1], [(0, 1)], 2, masks=["train", "test"])
        b = load_dataset(path)
        np.testing.assert_allclose(b.features[0], [0.5, 0.5])
        np.testing.assert_allclose(b.features[1], [0.0, 0.0])  # zero row kept

    def test_nonzero_rows_sum_to_one(self, tmp_path):
        rng = np.random.default_rng(0)
        feats = np.abs(rng.standard_normal((6, 4)))
        path = write_dataset(tmp_path / "d", feats, [0] * 6,
                             [(0, 1)], 2, masks=["train"] + ["test"] * 5)
        b = load_dataset(path)
        np.testing.assert_allclose(np.abs(b.features).sum(axis=1), 1,
                                   atol=1e-9)

    def test_overlapping_masks_flagged(self, toy2_path):
        # the one-token-per-node file format cannot express overlap, so the
        # guard is exercised on an in-memory bundle
        b = load_dataset(toy2_path)
        b.split.test[0] = True
        violations = validate_bundle(b)
        assert any("overlap" in v for v in violations)

    def test_label_out_of_range(self, tmp_path):
        path = write_dataset(tmp_path / "d", [[1.0], [1.0]], [0, 2],
                             [(0, 1)], 2, masks=["train", "test"])
        with pytest.raises(DataError, match="label 2 out of range"):
            load_dataset(path)

    def test_nan_feature_rejected(self, tmp_path):
        path = write_dataset(tmp_path / "d", [[1.0], [float("nan")]], [0, 1],
                             [(0, 1)], 2, masks=["train", "test"])
        with pytest.raises(DataError, match="non-finite"):
            load_dataset(path)

    def test_missing_file(self, tmp_path):
        path = write_dataset(tmp_path / "d", [[1.0], [1.0]], [0, 1],
                             [(0, 1)], 2, masks=["train", "test"])
        import os
        os.remove(f"{path}/labels.csv")
        with pytest.raises(DataError, match="missing file"):
            load_dataset(path)

    def test_edge_out_of_range_with_line(self, tmp_path):
        path = write_dataset(tmp_path / "d", [[1.0], [1.0]], [0, 1],
                             [(0, 5)], 2, masks=["train", "test"])
        with pytest.raises(DataError, match="edges.csv:1"):
            load_dataset(path)

    def test_feature_shape_mismatch(self, tmp_path):
        path = write_dataset(tmp_path / "d", [[1.0], [1.0]], [0, 1],
                             [(0, 1)], 2, masks=["train", "test"])
        with open(f"{path}/features.csv", "w") as fh:
            fh.write("1.0\n")
        with pytest.raises(DataError, match="shape"):
            load_dataset(path)

    def test_missing_fold_fails(self, tmp_path):
        path = write_dataset(tmp_path / "d", [[1.0], [1.0]], [0, 1],
                             [(0, 1)], 2, folds=[["train", "test"]] * 10)
        import os
        os.remove(f"{path}/folds/fold_9.csv")
        with pytest.raises(DataError, match="fold_9"):
            load_dataset(path)

    def test_folds_load(self, tmp_path):
        path = write_dataset(tmp_path / "d", [[1.0], [1.0]], [0, 1],
                             [(0, 1)], 2, folds=[["train", "test"]] * 10)
        b = load_dataset(path)
        assert b.is_folds
        assert len(b.split) == 10

    def test_round_trip_counts(self, tmp_path):
        rng = np.random.default_rng(1)
        feats = rng.standard_normal((7, 3))
        labels = rng.integers(0, 4, size=7)
        edges = [(0, 1), (2, 3), (4, 5), (5, 6)]
        path = write_dataset(tmp_path / "d", feats, labels, edges, 4,
                             masks=["train"] * 3 + ["val"] * 2 + ["test"] * 2)
        b = load_dataset(path)
        assert b.n_nodes == 7
        assert b.features.shape == (7, 3)
        assert b.n_classes == 4
        assert len(b.edges.edges) == 4


class TestValidateBundle:
    def test_valid_toy2(self, toy2_path):
        assert validate_bundle(load_dataset(toy2_path)) == []

    def test_label_equal_to_n_classes(self, toy2_path):
        b = load_dataset(toy2_path)
        b.labels[0] = b.n_classes
        violations = validate_bundle(b)
        assert len(violations) == 1
        assert "out of range" in violations[0]

    def test_nan_feature(self, toy2_path):
        b = load_dataset(toy2_path)
        b.features[0, 0] = np.nan
        violations = validate_bundle(b)
        assert len(violations) == 1
        assert "non-finite" in violations[0]
