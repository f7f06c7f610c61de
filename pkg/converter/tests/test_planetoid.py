import os
import pickle

import numpy as np
import pytest
from polyfilter.data import load_dataset, validate_bundle

from converter import ConvertError, convert_planetoid
from conftest import make_planetoid_raw


def _dir_bytes(path):
    out = {}
    for root, _, files in os.walk(path):
        for fn in sorted(files):
            full = os.path.join(root, fn)
            with open(full, "rb") as fh:
                out[os.path.relpath(full, path)] = fh.read()
    return out


class TestConvert:
    def test_counts_and_round_trip(self, planetoid_raw, tmp_path):
        out = convert_planetoid(planetoid_raw, str(tmp_path / "out"))
        b = load_dataset(out)
        assert b.name == "tiny"
        assert b.n_nodes == 8
        assert b.features.shape == (8, 4)
        assert b.n_classes == 2
        assert validate_bundle(b) == []

    def test_standard_split_masks(self, planetoid_raw, tmp_path):
        out = convert_planetoid(planetoid_raw, str(tmp_path / "out"))
        b = load_dataset(out)
        # first len(y)=2 train, val fills the rest of the non-test block,
        # test.index ids {5,6,7} test
        assert b.split.train.tolist() == [True, True] + [False] * 6
        assert b.split.val.tolist() == [False, False, True, True, True,
                                        False, False, False]
        assert b.split.test.tolist() == [False] * 5 + [True] * 3

    def test_masks_pairwise_disjoint(self, planetoid_raw, tmp_path):
        out = convert_planetoid(planetoid_raw, str(tmp_path / "out"))
        s = load_dataset(out).split
        assert not np.any(s.train & s.val)
        assert not np.any(s.train & s.test)
        assert not np.any(s.val & s.test)

    def test_shuffled_test_index_rows_land_at_their_ids(self, planetoid_raw,
                                                        tmp_path):
        # test.index is 6,5,7: tx row 0 belongs to node 6, row 1 to node 5
        out = convert_planetoid(planetoid_raw, str(tmp_path / "out"))
        feats = np.loadtxt(os.path.join(out, "features.csv"), delimiter=",")
        with open(os.path.join(planetoid_raw, "ind.tiny.tx"), "rb") as fh:
            tx = pickle.load(fh, encoding="latin1").toarray()
        np.testing.assert_allclose(feats[6], tx[0])
        np.testing.assert_allclose(feats[5], tx[1])
        np.testing.assert_allclose(feats[7], tx[2])

    def test_citeseer_style_gaps(self, tmp_path):
        raw = make_planetoid_raw(tmp_path / "raw", gaps=True)
        out = convert_planetoid(raw, str(tmp_path / "out"))
        b = load_dataset(out)
        assert b.n_nodes == 9  # test block spans ids 5..8
        assert validate_bundle(b) == []
        # the missing id 7 is an isolated placeholder: zero row, no mask
        feats = np.loadtxt(os.path.join(out, "features.csv"), delimiter=",")
        np.testing.assert_array_equal(feats[7], 0)
        assert not (b.split.train[7] or b.split.val[7] or b.split.test[7])

    def test_deterministic_byte_identical(self, planetoid_raw, tmp_path):
        a = convert_planetoid(planetoid_raw, str(tmp_path / "a"))
        b = convert_planetoid(planetoid_raw, str(tmp_path / "b"))
        assert _dir_bytes(a) == _dir_bytes(b)


class TestErrors:
    def test_missing_file(self, planetoid_raw, tmp_path):
        os.remove(os.path.join(planetoid_raw, "ind.tiny.graph"))
        with pytest.raises(ConvertError, match="missing file"):
            convert_planetoid(planetoid_raw, str(tmp_path / "out"))

    def test_feature_width_mismatch(self, planetoid_raw, tmp_path):
        import scipy.sparse as sp
        with open(os.path.join(planetoid_raw, "ind.tiny.tx"), "wb") as fh:
            pickle.dump(sp.csr_matrix(np.ones((3, 7))), fh)
        with pytest.raises(ConvertError, match="features"):
            convert_planetoid(planetoid_raw, str(tmp_path / "out"))

    def test_test_index_length_mismatch(self, planetoid_raw, tmp_path):
        with open(os.path.join(planetoid_raw, "ind.tiny.test.index"), "w") as fh:
            fh.write("5\n6\n")
        with pytest.raises(ConvertError, match="test.index"):
            convert_planetoid(planetoid_raw, str(tmp_path / "out"))

    def test_name_inference_requires_one_dataset(self, planetoid_raw,
                                                 tmp_path):
        with open(os.path.join(planetoid_raw, "ind.other.x"), "wb") as fh:
            pickle.dump(np.ones((1, 1)), fh)
        with pytest.raises(ConvertError, match="exactly one"):
            convert_planetoid(planetoid_raw, str(tmp_path / "out"))
