"""CSR sparse matrices, graph construction, and the scaled normalized Laplacian.

The scaled operator is 0.5 * (I - D^{-1/2} A D^{-1/2}), whose spectrum lies in
[0, 1]. Isolated nodes use the convention D^{-1/2} = 0, so their only entry is
the diagonal 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class EdgeList:
    """Raw directed edge pairs over n_nodes; duplicates and self-loops allowed."""

    n_nodes: int
    edges: list[tuple[int, int]]


class CsrMatrix:
    """Immutable CSR matrix with float64 values and sorted column indices."""

    __slots__ = ("n_rows", "n_cols", "row_ptr", "col_idx", "values", "_sp")

    def __init__(self, n_rows, n_cols, row_ptr, col_idx, values):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.row_ptr = np.asarray(row_ptr, dtype=np.int64)
        self.col_idx = np.asarray(col_idx, dtype=np.int64)
        self.values = np.asarray(values, dtype=np.float64)
        self._sp = None
        if self.row_ptr.shape != (self.n_rows + 1,):
            raise ValueError("row_ptr must have length n_rows + 1")
        if self.row_ptr[0] != 0 or self.row_ptr[-1] != len(self.col_idx):
            raise ValueError("row_ptr endpoints inconsistent with col_idx")
        if np.any(np.diff(self.row_ptr) < 0):
            raise ValueError("row_ptr must be non-decreasing")
        if len(self.col_idx) != len(self.values):
            raise ValueError("col_idx and values length mismatch")
        if len(self.col_idx) and (self.col_idx.min() < 0 or self.col_idx.max() >= self.n_cols):
            raise ValueError("column index out of range")
        for i in range(self.n_rows):
            cols = self.col_idx[self.row_ptr[i]:self.row_ptr[i + 1]]
            if len(cols) > 1 and np.any(np.diff(cols) <= 0):
                raise ValueError(f"row {i}: column indices not strictly increasing")

    @property
    def nnz(self) -> int:
        return len(self.values)

    def toarray(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols))
        for i in range(self.n_rows):
            s, e = self.row_ptr[i], self.row_ptr[i + 1]
            out[i, self.col_idx[s:e]] = self.values[s:e]
        return out

    def to_edge_list(self) -> EdgeList:
        """Recover the (src, dst) pairs of the stored nonzeros."""
        src = np.repeat(np.arange(self.n_rows), np.diff(self.row_ptr))
        return EdgeList(self.n_rows, list(zip(src.tolist(), self.col_idx.tolist())))

    def _as_scipy(self) -> sp.csr_matrix:
        if self._sp is None:
            m = sp.csr_matrix(
                (self.values, self.col_idx, self.row_ptr),
                shape=(self.n_rows, self.n_cols),
                copy=False,
            )
            object.__setattr__(self, "_sp", m)
        return self._sp


def symmetrize_dedup(e: EdgeList) -> CsrMatrix:
    """Binary symmetric adjacency: dedup edges, drop self-loops, mirror both ways."""
    n = e.n_nodes
    if n < 1:
        raise ValueError("n_nodes must be >= 1")
    for src, dst in e.edges:
        if not (0 <= src < n and 0 <= dst < n):
            raise ValueError(f"edge ({src}, {dst}) out of range for n_nodes={n}")
    if e.edges:
        arr = np.asarray(e.edges, dtype=np.int64)
        keep = arr[:, 0] != arr[:, 1]
        arr = arr[keep]
        both = np.concatenate([arr, arr[:, ::-1]], axis=0)
    else:
        both = np.zeros((0, 2), dtype=np.int64)
    if len(both):
        keys = both[:, 0] * n + both[:, 1]
        keys = np.unique(keys)
        rows, cols = keys // n, keys % n
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
    counts = np.bincount(rows, minlength=n)
    row_ptr = np.concatenate([[0], np.cumsum(counts)])
    return CsrMatrix(n, n, row_ptr, cols, np.ones(len(cols)))


def laplacian_scaled(a: CsrMatrix) -> CsrMatrix:
    """0.5 * (I - D^{-1/2} A D^{-1/2}) for a symmetric binary adjacency."""
    n = a.n_rows
    deg = np.diff(a.row_ptr).astype(np.float64)
    dinv_sqrt = np.zeros(n)
    nz = deg > 0
    dinv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])

    row_ptr = np.zeros(n + 1, dtype=np.int64)
    cols_out: list[np.ndarray] = []
    vals_out: list[np.ndarray] = []
    for i in range(n):
        s, e = a.row_ptr[i], a.row_ptr[i + 1]
        nbr = a.col_idx[s:e]
        off = -0.5 * dinv_sqrt[i] * dinv_sqrt[nbr] * a.values[s:e]
        pos = np.searchsorted(nbr, i)
        cols_i = np.insert(nbr, pos, i)
        vals_i = np.insert(off, pos, 0.5)
        cols_out.append(cols_i)
        vals_out.append(vals_i)
        row_ptr[i + 1] = row_ptr[i] + len(cols_i)
    return CsrMatrix(
        n, n, row_ptr,
        np.concatenate(cols_out) if cols_out else np.zeros(0, dtype=np.int64),
        np.concatenate(vals_out) if vals_out else np.zeros(0),
    )


def chebyshev_operator(l_scaled: CsrMatrix) -> CsrMatrix:
    """Shifted operator 2*L_scaled - I = L_sym - I, spectrum in [-1, 1].

    Assumes the diagonal entry is structurally present in every row, which holds
    for the output of laplacian_scaled.
    """
    values = 2.0 * l_scaled.values
    row = np.repeat(np.arange(l_scaled.n_rows), np.diff(l_scaled.row_ptr))
    diag = row == l_scaled.col_idx
    if int(diag.sum()) != l_scaled.n_rows:
        raise ValueError("operator is missing explicit diagonal entries")
    values[diag] -= 1.0
    return CsrMatrix(l_scaled.n_rows, l_scaled.n_cols,
                     l_scaled.row_ptr, l_scaled.col_idx, values)


def spmm(m: CsrMatrix, x: np.ndarray) -> np.ndarray:
    """Sparse-dense product m @ x with deterministic per-row accumulation."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("x must be a 2-D array")
    if m.n_cols != x.shape[0]:
        raise ValueError(f"shape mismatch: {m.n_rows}x{m.n_cols} @ {x.shape}")
    return np.asarray(m._as_scipy() @ x)
