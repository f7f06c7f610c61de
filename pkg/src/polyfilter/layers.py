"""PolyConv layer (bases -> per-basis LayerNorm -> concat -> linear projection)
and the 2-layer node-classification network, plus JSON checkpointing."""

from __future__ import annotations

import base64
import json
import os

import numpy as np

from . import autodiff as ad
from . import basis
from .autodiff import Tensor
from .sparse import CsrMatrix

LN_EPS = 1e-5


class PolyConvLayer:
    """One graph-convolution layer.

    Owns its raw shape parameters (per-layer, shared across the K bases),
    per-basis LayerNorm affines, and the projection W (K*f_in x f_out) + bias.
    Parameter values live in `self.params` as plain float64 arrays; each forward
    pass registers them on a fresh tape.
    """

    def __init__(self, family: str, K: int, f_in: int, f_out: int,
                 rng: np.random.Generator, krawtchouk_n: int = 10,
                 use_layernorm: bool = True):
        if family not in basis.FAMILY_NAMES:
            raise ValueError(f"unknown family {family!r}")
        if K < 1:
            raise ValueError("K must be >= 1")
        if family == "krawtchouk" and K > krawtchouk_n + 1:
            raise ValueError(f"K={K} needs krawtchouk_n >= {K - 1}")
        self.family = family
        self.K = K
        self.f_in = f_in
        self.f_out = f_out
        self.krawtchouk_n = krawtchouk_n
        self.use_layernorm = use_layernorm  # test-only switch; True in normal use

        self.params: dict[str, np.ndarray] = {}
        for name, v in basis.initial_raw_params(family).items():
            self.params[name] = np.array([[v]])
        for k in range(K):
            self.params[f"ln_gamma.{k}"] = np.ones((1, f_in))
            self.params[f"ln_beta.{k}"] = np.zeros((1, f_in))
        limit = np.sqrt(6.0 / (K * f_in + f_out))
        self.params["W"] = rng.uniform(-limit, limit, size=(K * f_in, f_out))
        self.params["bias"] = np.zeros((1, f_out))


def _register(layer: PolyConvLayer, tape: ad.Tape | None) -> dict[str, Tensor]:
    """Tape leaves for training, plain constants for evaluation."""
    if tape is None:
        return {k: ad.constant(v) for k, v in layer.params.items()}
    return {k: tape.leaf(v) for k, v in layer.params.items()}


def conv_forward(layer: PolyConvLayer, L: CsrMatrix, x: Tensor,
                 ptensors: dict[str, Tensor] | None = None) -> Tensor:
    """Bases -> per-basis LayerNorm (including k=0) -> concat -> Z W + bias."""
    if x.data.shape[1] != layer.f_in:
        raise ValueError(f"expected {layer.f_in} input features, got {x.data.shape[1]}")
    if ptensors is None:
        ptensors = _register(layer, None)
    raw = {n: ptensors[n] for n in basis.shape_param_names(layer.family)}
    fam = basis.make_family(layer.family, raw, layer.krawtchouk_n)
    bases = basis.generate_bases(fam, L, x, layer.K)
    if layer.use_layernorm:
        normed = [ad.layernorm(b, ptensors[f"ln_gamma.{k}"],
                               ptensors[f"ln_beta.{k}"], LN_EPS)
                  for k, b in enumerate(bases)]
    else:
        normed = bases
    z = ad.concat_cols(normed) if len(normed) > 1 else normed[0]
    return ad.add_row_bias(ad.matmul(z, ptensors["W"]), ptensors["bias"])


class NodeClassifier:
    """Two PolyConv layers with ReLU + dropout between and a log-softmax head."""

    def __init__(self, family: str, f_in: int, hidden: int, n_classes: int,
                 K: int, rng: np.random.Generator, dropout_p: float = 0.5,
                 krawtchouk_n: int = 10, use_layernorm: bool = True):
        self.layer1 = PolyConvLayer(family, K, f_in, hidden, rng,
                                    krawtchouk_n, use_layernorm)
        self.layer2 = PolyConvLayer(family, K, hidden, n_classes, rng,
                                    krawtchouk_n, use_layernorm)
        self.dropout_p = dropout_p

    @property
    def layers(self):
        return (self.layer1, self.layer2)

    def named_params(self) -> dict[str, np.ndarray]:
        out = {}
        for i, layer in enumerate(self.layers, start=1):
            for k, v in layer.params.items():
                out[f"layer{i}.{k}"] = v
        return out

    def set_param(self, name: str, value: np.ndarray):
        prefix, key = name.split(".", 1)
        layer = self.layer1 if prefix == "layer1" else self.layer2
        layer.params[key] = value

    def effective_shape_params(self) -> dict[str, dict[str, float]]:
        """Constrained alpha/beta/c/p per layer, for reports and checkpoints."""
        out = {}
        for i, layer in enumerate(self.layers, start=1):
            raw = {n: ad.constant(layer.params[n])
                   for n in basis.shape_param_names(layer.family)}
            fam = basis.make_family(layer.family, raw, layer.krawtchouk_n)
            eff = basis.effective_params(fam)
            out[f"layer{i}"] = {k: v.item() for k, v in eff.items()}
        return out


def model_forward(model: NodeClassifier, L: CsrMatrix, x: Tensor,
                  training: bool, seed: int,
                  tape: ad.Tape | None = None) -> tuple[Tensor, dict[str, Tensor]]:
    """Log-probabilities (n x n_classes) plus the registered parameter tensors."""
    p1 = _register(model.layer1, tape)
    p2 = _register(model.layer2, tape)
    h = ad.relu(conv_forward(model.layer1, L, x, p1))
    h = ad.dropout(h, model.dropout_p, seed, training)
    logits = conv_forward(model.layer2, L, h, p2)
    logp = ad.log_softmax_rows(logits)
    ptensors = {f"layer1.{k}": v for k, v in p1.items()}
    ptensors.update({f"layer2.{k}": v for k, v in p2.items()})
    return logp, ptensors


# ---------------------------------------------------------------------------
# checkpoint format: JSON with base64 little-endian float64 arrays


def _encode(arr: np.ndarray) -> dict:
    return {
        "shape": list(arr.shape),
        "data": base64.b64encode(arr.astype("<f8").tobytes()).decode("ascii"),
    }


def _decode(entry: dict) -> np.ndarray:
    flat = np.frombuffer(base64.b64decode(entry["data"]), dtype="<f8")
    return flat.reshape(entry["shape"]).astype(np.float64)


def save_checkpoint(model: NodeClassifier, path: str):
    doc = {
        "meta": {
            "family": model.layer1.family,
            "K": model.layer1.K,
            "f_in": model.layer1.f_in,
            "hidden": model.layer1.f_out,
            "n_classes": model.layer2.f_out,
            "dropout_p": model.dropout_p,
            "krawtchouk_n": model.layer1.krawtchouk_n,
        },
        "params": {k: _encode(v) for k, v in model.named_params().items()},
        "effective_shape_params": model.effective_shape_params(),
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(doc, fh)
    os.replace(tmp, path)


def load_checkpoint(path: str) -> NodeClassifier:
    with open(path) as fh:
        doc = json.load(fh)
    m = doc["meta"]
    model = NodeClassifier(m["family"], m["f_in"], m["hidden"], m["n_classes"],
                           m["K"], np.random.default_rng(0), m["dropout_p"],
                           m["krawtchouk_n"])
    for name, entry in doc["params"].items():
        model.set_param(name, _decode(entry))
    return model
