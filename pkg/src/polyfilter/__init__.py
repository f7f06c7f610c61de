"""Adaptive orthogonal-polynomial spectral graph filters with a minimal
reverse-mode autodiff core and a full-batch node-classification engine."""

from .autodiff import Tape, Tensor
from .data import DatasetBundle, load_dataset, validate_bundle
from .sparse import CsrMatrix, EdgeList, laplacian_scaled, spmm, symmetrize_dedup
from .train import RunResult, TrainConfig, run_ten_fold, train_single_split

__all__ = [
    "Tape", "Tensor", "CsrMatrix", "EdgeList",
    "laplacian_scaled", "spmm", "symmetrize_dedup",
    "DatasetBundle", "load_dataset", "validate_bundle",
    "TrainConfig", "RunResult", "train_single_split", "run_ten_fold",
]

__version__ = "0.1.0"
