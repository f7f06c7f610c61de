"""Minimal reverse-mode autodiff over dense float64 matrices.

A Tensor is always 2-D; scalars are (1, 1) so that learnable shape parameters
ride the same tape as weight matrices. Ops record a backward closure onto the
tape when any input requires gradients; backward() walks the tape in strict
reverse order and accumulates (+=) into a node_id -> gradient map.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .sparse import CsrMatrix, spmm


class Tape:
    """Append-only record of differentiable operations."""

    def __init__(self):
        # parallel lists: node i has backward _backwards[i] (None for leaves)
        self._backwards: list[Callable | None] = []

    def _new_node(self, backward: Callable | None) -> int:
        self._backwards.append(backward)
        return len(self._backwards) - 1

    def leaf(self, data) -> "Tensor":
        """Register a trainable leaf (parameter)."""
        t = Tensor(data, requires_grad=True)
        t.tape = self
        t.node_id = self._new_node(None)
        return t

    def backward(self, loss: "Tensor") -> dict[int, np.ndarray]:
        """Gradient of a (1,1) loss wrt every node, keyed by node_id."""
        if loss.tape is not self or loss.node_id is None:
            raise ValueError("loss is not recorded on this tape")
        if loss.data.shape != (1, 1):
            raise ValueError("backward requires a scalar loss")
        grads: dict[int, np.ndarray] = {loss.node_id: np.ones((1, 1))}
        for nid in range(loss.node_id, -1, -1):
            g = grads.get(nid)
            bw = self._backwards[nid]
            if g is None or bw is None:
                continue
            bw(g, grads)
        return grads


class Tensor:
    """Dense matrix (or (1,1) scalar) optionally attached to a tape."""

    __slots__ = ("data", "tape", "node_id", "requires_grad")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2:
            raise ValueError("Tensor data must be 0-D or 2-D")
        self.data = arr
        self.tape: Tape | None = None
        self.node_id: int | None = None
        self.requires_grad = requires_grad

    @property
    def shape(self):
        return self.data.shape

    def item(self) -> float:
        if self.data.shape != (1, 1):
            raise ValueError("item() requires a scalar tensor")
        return float(self.data[0, 0])

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"


def constant(data) -> Tensor:
    return Tensor(data, requires_grad=False)


def _as_scalar_tensor(v) -> Tensor:
    if isinstance(v, Tensor):
        if v.data.shape != (1, 1):
            raise ValueError("expected a scalar tensor")
        return v
    return constant(float(v))


def _result(tape_inputs: list[Tensor], data: np.ndarray, make_backward) -> Tensor:
    """Build the output tensor; record backward only if some input has grads."""
    live = [t for t in tape_inputs if t.requires_grad]
    out = Tensor(data, requires_grad=bool(live))
    if not live:
        return out
    tapes = {t.tape for t in live if t.tape is not None}
    if len(tapes) > 1:
        raise ValueError("inputs belong to different tapes")
    if not tapes:
        raise ValueError("grad-requiring input is not attached to a tape")
    tape = tapes.pop()
    out.tape = tape
    out.node_id = tape._new_node(None)
    out_id = out.node_id

    input_ids = {id(t): t.node_id for t in live}

    def accum(grads, t: Tensor, g: np.ndarray):
        nid = input_ids.get(id(t))
        if nid is None:
            return
        if nid in grads:
            grads[nid] = grads[nid] + g
        else:
            grads[nid] = g

    def backward(g, grads):
        for t, gt in make_backward(g):
            if t is not None and t.requires_grad:
                accum(grads, t, gt)

    tape._backwards[out_id] = backward
    return out


# ---------------------------------------------------------------------------
# matrix ops


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape[1] != b.data.shape[0]:
        raise ValueError(f"matmul shape mismatch: {a.data.shape} @ {b.data.shape}")
    adata, bdata = a.data, b.data

    def bw(g):
        return [(a, g @ bdata.T), (b, adata.T @ g)]

    return _result([a, b], adata @ bdata, bw)


def spmm_const(m: CsrMatrix, x: Tensor) -> Tensor:
    """Constant sparse operator times tape variable; dX = M^T dY."""
    def bw(g):
        return [(x, np.asarray(m._as_scipy().T @ g))]

    return _result([x], spmm(m, x.data), bw)


def scale(x: Tensor, c: float) -> Tensor:
    c = float(c)
    return _result([x], c * x.data, lambda g: [(x, c * g)])


def add_row_bias(x: Tensor, b: Tensor) -> Tensor:
    """x + b with b of shape (1, cols) broadcast over rows."""
    if b.data.shape != (1, x.data.shape[1]):
        raise ValueError("bias shape mismatch")

    def bw(g):
        return [(x, g), (b, g.sum(axis=0, keepdims=True))]

    return _result([x, b], x.data + b.data, bw)


def scalar_affine_combine(y: Tensor, x1: Tensor, s1, x0: Tensor | None = None,
                          s0=None) -> Tensor:
    """y - s1*x1 - s0*x0 with scalar tape coefficients (x0 term optional).

    This is the three-term recurrence update: gradients reach both matrices and
    both scalars (ds = -<dOut, x>_F).
    """
    s1 = _as_scalar_tensor(s1)
    if x1.data.shape != y.data.shape:
        raise ValueError("x1/y shape mismatch")
    out = y.data - s1.data[0, 0] * x1.data
    inputs = [y, x1, s1]
    if x0 is not None:
        s0 = _as_scalar_tensor(s0)
        if x0.data.shape != y.data.shape:
            raise ValueError("x0/y shape mismatch")
        out = out - s0.data[0, 0] * x0.data
        inputs += [x0, s0]
    x1d, s1v = x1.data, s1.data[0, 0]
    x0d = x0.data if x0 is not None else None
    s0v = s0.data[0, 0] if x0 is not None else None

    def bw(g):
        res = [(y, g), (x1, -s1v * g),
               (s1, np.array([[-(g * x1d).sum()]]))]
        if x0 is not None:
            res += [(x0, -s0v * g), (s0, np.array([[-(g * x0d).sum()]]))]
        return res

    return _result(inputs, out, bw)


def layernorm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    """Per-row standardization (biased variance) with learnable affine."""
    n, f = x.data.shape
    if gamma.data.shape != (1, f) or beta.data.shape != (1, f):
        raise ValueError("gamma/beta must have shape (1, cols)")
    mu = x.data.mean(axis=1, keepdims=True)
    var = x.data.var(axis=1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv_std
    out = gamma.data * xhat + beta.data
    gdata = gamma.data

    def bw(g):
        dxhat = g * gdata
        # per-row: dx = inv_std/f * (f*dxhat - sum(dxhat) - xhat * sum(dxhat*xhat))
        dx = (inv_std / f) * (
            f * dxhat
            - dxhat.sum(axis=1, keepdims=True)
            - xhat * (dxhat * xhat).sum(axis=1, keepdims=True)
        )
        return [(x, dx),
                (gamma, (g * xhat).sum(axis=0, keepdims=True)),
                (beta, g.sum(axis=0, keepdims=True))]

    return _result([x, gamma, beta], out, bw)


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    return _result([x], x.data * mask, lambda g: [(x, g * mask)])


def dropout(x: Tensor, p: float, seed: int, training: bool) -> Tensor:
    """Inverted dropout, deterministic per seed; identity in eval mode."""
    if not (0.0 <= p < 1.0):
        raise ValueError("dropout rate must be in [0, 1)")
    if not training or p == 0.0:
        return x
    rng = np.random.default_rng(seed)
    keep = rng.random(x.data.shape) >= p
    factor = keep / (1.0 - p)
    return _result([x], x.data * factor, lambda g: [(x, g * factor)])


def concat_cols(xs: list[Tensor]) -> Tensor:
    if not xs:
        raise ValueError("concat_cols needs at least one tensor")
    n = xs[0].data.shape[0]
    if any(t.data.shape[0] != n for t in xs):
        raise ValueError("row count mismatch in concat_cols")
    widths = [t.data.shape[1] for t in xs]
    offsets = np.concatenate([[0], np.cumsum(widths)])

    def bw(g):
        return [(t, g[:, offsets[i]:offsets[i + 1]]) for i, t in enumerate(xs)]

    return _result(list(xs), np.concatenate([t.data for t in xs], axis=1), bw)


def log_softmax_rows(x: Tensor) -> Tensor:
    shifted = x.data - x.data.max(axis=1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    out = shifted - lse
    soft = np.exp(out)

    def bw(g):
        return [(x, g - soft * g.sum(axis=1, keepdims=True))]

    return _result([x], out, bw)


def nll_loss_masked(logp: Tensor, labels: np.ndarray, mask: np.ndarray) -> Tensor:
    """Mean negative log-likelihood over masked rows."""
    labels = np.asarray(labels, dtype=np.int64)
    mask = np.asarray(mask, dtype=bool)
    idx = np.flatnonzero(mask)
    if len(idx) == 0:
        raise ValueError("nll_loss_masked: empty mask")
    picked = logp.data[idx, labels[idx]]
    loss = -picked.mean()

    def bw(g):
        d = np.zeros_like(logp.data)
        d[idx, labels[idx]] = -g[0, 0] / len(idx)
        return [(logp, d)]

    return _result([logp], np.array([[loss]]), bw)


# ---------------------------------------------------------------------------
# scalar ops (all operate on (1,1) tensors; plain floats become constants)


def softplus_s(x: Tensor) -> Tensor:
    x = _as_scalar_tensor(x)
    v = np.logaddexp(0.0, x.data)
    sig = 1.0 / (1.0 + np.exp(-x.data))
    return _result([x], v, lambda g: [(x, g * sig)])


def sigmoid_s(x: Tensor) -> Tensor:
    x = _as_scalar_tensor(x)
    s = 1.0 / (1.0 + np.exp(-x.data))
    return _result([x], s, lambda g: [(x, g * s * (1.0 - s))])


def s_add(a, b) -> Tensor:
    a, b = _as_scalar_tensor(a), _as_scalar_tensor(b)
    return _result([a, b], a.data + b.data, lambda g: [(a, g), (b, g)])


def s_sub(a, b) -> Tensor:
    a, b = _as_scalar_tensor(a), _as_scalar_tensor(b)
    return _result([a, b], a.data - b.data, lambda g: [(a, g), (b, -g)])


def s_mul(a, b) -> Tensor:
    a, b = _as_scalar_tensor(a), _as_scalar_tensor(b)
    av, bv = a.data.copy(), b.data.copy()
    return _result([a, b], a.data * b.data, lambda g: [(a, g * bv), (b, g * av)])


def s_div(a, b) -> Tensor:
    a, b = _as_scalar_tensor(a), _as_scalar_tensor(b)
    av, bv = a.data.copy(), b.data.copy()
    return _result([a, b], a.data / b.data,
                   lambda g: [(a, g / bv), (b, -g * av / (bv * bv))])


def backward(loss: Tensor) -> dict[int, np.ndarray]:
    """Convenience wrapper: gradients of a scalar loss keyed by node_id."""
    if loss.tape is None:
        raise ValueError("loss has no tape (nothing requires gradients)")
    return loss.tape.backward(loss)
