"""Built-in oracle suites: recurrence expansion, quadrature orthogonality,
finite-difference gradient checks, and a dense straight-line reimplementation
of the conv layer. These run behind the `selftest` CLI subcommand."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_genlaguerre

from . import autodiff as ad
from . import basis
from .layers import LN_EPS, NodeClassifier, PolyConvLayer, conv_forward, model_forward
from .sparse import CsrMatrix, EdgeList, laplacian_scaled, symmetrize_dedup
from .train import build_operator


@dataclass
class SuiteReport:
    name: str
    n_pass: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, cond: bool, msg: str):
        if cond:
            self.n_pass += 1
        else:
            self.failures.append(msg)


def _inv_softplus(y: float) -> float:
    return float(np.log(np.expm1(y)))


def _scalar_operator(value: float) -> CsrMatrix:
    return CsrMatrix(1, 1, [0, 1], [0], [value])


def _laguerre_family(alpha: float) -> basis.Laguerre:
    return basis.Laguerre(alpha_raw=ad.constant(_inv_softplus(alpha + 0.99)))


# ---------------------------------------------------------------------------
# suite 1: recurrence vs explicit monic expansion


def suite_laguerre_recurrence(max_k: int = 5) -> SuiteReport:
    rep = SuiteReport("laguerre_recurrence")
    for alpha in (-0.5, 0.0, 1.0, 2.5):
        fam = _laguerre_family(alpha)
        for x in np.linspace(0.0, 1.0, 20):
            got = basis.generate_bases(fam, _scalar_operator(x),
                                       ad.constant(1.0), max_k + 1)
            for k, t in enumerate(got):
                want = basis.monic_laguerre_reference(k, alpha, float(x))
                err = abs(t.item() - want) / max(1.0, abs(want))
                rep.check(err <= 1e-10,
                          f"alpha={alpha} k={k} x={x:.3f}: rel err {err:.2e}")
    return rep


# ---------------------------------------------------------------------------
# suite 2: Gauss-Laguerre orthogonality of the monic family


def suite_orthogonality(max_deg: int = 4) -> SuiteReport:
    rep = SuiteReport("gauss_laguerre_orthogonality")
    for alpha in (0.0, 1.0):
        nodes, weights = roots_genlaguerre(64, alpha)
        vals = np.array([[basis.monic_laguerre_reference(k, alpha, float(x))
                          for x in nodes] for k in range(max_deg + 1)])
        gram = (vals * weights) @ vals.T
        norms = np.sqrt(np.diag(gram))
        for m in range(max_deg + 1):
            for n in range(m + 1, max_deg + 1):
                rel = abs(gram[m, n]) / (norms[m] * norms[n])
                rep.check(rel <= 1e-8,
                          f"alpha={alpha} <P{m},P{n}>: {rel:.2e}")
    return rep


# ---------------------------------------------------------------------------
# suite 3: finite-difference gradient checks


def fd_grad(f, params: dict[str, np.ndarray], h: float = 1e-5
            ) -> dict[str, np.ndarray]:
    """Central finite differences of scalar f(params) wrt every entry."""
    out = {}
    for name, p in params.items():
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = p[idx]
            p[idx] = orig + h
            fp = f(params)
            p[idx] = orig - h
            fm = f(params)
            p[idx] = orig
            g[idx] = (fp - fm) / (2 * h)
        out[name] = g
    return out


def _rel_inf(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1.0))


def _random_graph(rng: np.random.Generator, n: int, m: int) -> EdgeList:
    edges = [(int(rng.integers(n)), int(rng.integers(n))) for _ in range(m)]
    return EdgeList(n, edges)


def _model_loss(data_x, L, labels, mask, model: NodeClassifier):
    def f(params: dict[str, np.ndarray]) -> float:
        for name, v in params.items():
            model.set_param(name, v)
        logp, _ = model_forward(model, L, ad.constant(data_x), False, 0, None)
        return ad.nll_loss_masked(logp, labels, mask).item()
    return f


def suite_gradient_checks(tol: float = 1e-4) -> SuiteReport:
    rep = SuiteReport("finite_difference_gradients")
    rng = np.random.default_rng(7)

    # elementary op spot checks through small composite losses
    def op_case(name, make_loss, params):
        tape = ad.Tape()
        tensors = {k: tape.leaf(v) for k, v in params.items()}
        loss = make_loss(tensors)
        grads = tape.backward(loss)
        analytic = {k: grads.get(t.node_id, np.zeros_like(t.data))
                    for k, t in tensors.items()}

        def f(ps):
            tp = ad.Tape()
            ts = {k: tp.leaf(ps[k]) for k in ps}
            return make_loss(ts).item()

        fd = fd_grad(f, {k: v.copy() for k, v in params.items()})
        for k in params:
            err = _rel_inf(analytic[k], fd[k])
            rep.check(err <= tol, f"{name}/{k}: rel err {err:.2e}")

    def scalar_loss(t):
        # sum of all entries as a (1,1) tensor
        return ad.matmul(ad.constant(np.ones((1, t.data.shape[0]))),
                         ad.matmul(t, ad.constant(np.ones((t.data.shape[1], 1)))))

    for trial in range(5):
        a = rng.standard_normal((3, 4))
        b = rng.standard_normal((4, 2))
        op_case("matmul", lambda ts: scalar_loss(ad.matmul(ts["a"], ts["b"])),
                {"a": a, "b": b})

        adj = symmetrize_dedup(_random_graph(rng, 5, 8))
        L = laplacian_scaled(adj)
        x = rng.standard_normal((5, 3))
        op_case("spmm_const",
                lambda ts, L=L: scalar_loss(ad.spmm_const(L, ts["x"])),
                {"x": x})

        op_case("scalar_affine_combine",
                lambda ts: scalar_loss(ad.scalar_affine_combine(
                    ts["y"], ts["x1"], ts["s1"], ts["x0"], ts["s0"])),
                {"y": rng.standard_normal((3, 3)),
                 "x1": rng.standard_normal((3, 3)),
                 "x0": rng.standard_normal((3, 3)),
                 "s1": rng.standard_normal((1, 1)),
                 "s0": rng.standard_normal((1, 1))})

        op_case("layernorm",
                lambda ts: scalar_loss(ad.layernorm(
                    ts["x"], ts["g"], ts["b"], LN_EPS)),
                {"x": rng.standard_normal((4, 5)),
                 "g": 1.0 + 0.1 * rng.standard_normal((1, 5)),
                 "b": 0.1 * rng.standard_normal((1, 5))})

        op_case("relu",
                lambda ts: scalar_loss(ad.relu(ts["x"])),
                {"x": rng.standard_normal((4, 3)) + 0.05})

        op_case("dropout",
                lambda ts: scalar_loss(ad.dropout(ts["x"], 0.5, 123, True)),
                {"x": rng.standard_normal((4, 3))})

        op_case("concat_cols",
                lambda ts: scalar_loss(ad.concat_cols([ts["a"], ts["b"]])),
                {"a": rng.standard_normal((3, 2)),
                 "b": rng.standard_normal((3, 4))})

        lbl = rng.integers(0, 3, size=4)
        msk = np.array([True, False, True, True])
        op_case("nll_log_softmax",
                lambda ts, lbl=lbl, msk=msk: ad.nll_loss_masked(
                    ad.log_softmax_rows(ts["x"]), lbl, msk),
                {"x": rng.standard_normal((4, 3))})

        op_case("softplus_s",
                lambda ts: ad.s_mul(ad.softplus_s(ts["x"]), 2.0),
                {"x": rng.standard_normal((1, 1))})
        op_case("sigmoid_s",
                lambda ts: ad.s_div(ad.sigmoid_s(ts["x"]), ad.s_add(ts["y"], 2.0)),
                {"x": rng.standard_normal((1, 1)),
                 "y": abs(rng.standard_normal((1, 1)))})

    # full model gradient check per family on a 20-node random graph, K=4
    graph = _random_graph(rng, 20, 40)
    features = rng.standard_normal((20, 5))
    labels = rng.integers(0, 3, size=20)
    mask = rng.random(20) < 0.5
    mask[0] = True
    from .data import DatasetBundle, SplitMasks  # local import to avoid cycle
    bundle = DatasetBundle("synthetic", features, labels, 3, graph,
                           SplitMasks(mask, ~mask, ~mask))
    for family in basis.FAMILY_NAMES:
        L = build_operator(bundle, family)
        model = NodeClassifier(family, 5, 4, 3, 4, np.random.default_rng(3),
                               dropout_p=0.5, krawtchouk_n=10)
        tape = ad.Tape()
        logp, ptensors = model_forward(model, L, ad.constant(features),
                                       False, 0, tape)
        loss = ad.nll_loss_masked(logp, labels, mask)
        grads_by_node = tape.backward(loss)
        analytic = {k: grads_by_node.get(t.node_id, np.zeros_like(t.data))
                    for k, t in ptensors.items()}
        f = _model_loss(features, L, labels, mask, model)
        fd = fd_grad(f, {k: v.copy() for k, v in model.named_params().items()})
        for k in sorted(fd):
            err = _rel_inf(analytic[k], fd[k])
            rep.check(err <= tol, f"model[{family}]/{k}: rel err {err:.2e}")
    return rep


# ---------------------------------------------------------------------------
# suite 4: dense straight-line oracle for conv_forward


def _effective_plain(layer: PolyConvLayer) -> dict[str, float]:
    softplus = lambda v: float(np.logaddexp(0.0, v))  # noqa: E731
    sigmoid = lambda v: float(1.0 / (1.0 + np.exp(-v)))  # noqa: E731
    p = {k: float(v[0, 0]) for k, v in layer.params.items()
         if k in ("alpha_raw", "beta_raw", "c_raw", "p_raw")}
    if layer.family == "laguerre":
        return {"alpha": softplus(p["alpha_raw"]) - 0.99}
    if layer.family == "meixner":
        return {"beta": softplus(p["beta_raw"]), "c": sigmoid(p["c_raw"])}
    if layer.family == "krawtchouk":
        return {"p": sigmoid(p["p_raw"]), "N": layer.krawtchouk_n}
    return {}


def dense_conv_oracle(layer: PolyConvLayer, L_dense: np.ndarray,
                      x: np.ndarray) -> np.ndarray:
    """conv_forward recomputed with dense numpy only (no CSR, no tape)."""
    eff = _effective_plain(layer)
    bases = [x]
    for k in range(layer.K - 1):
        if layer.family == "chebyshev":
            if k == 0:
                bases.append(L_dense @ x)
            else:
                bases.append(2.0 * (L_dense @ bases[-1]) - bases[-2])
            continue
        if layer.family == "laguerre":
            a = eff["alpha"]
            b, c = 2 * k + a + 1, k * (k + a)
        elif layer.family == "meixner":
            be, cc = eff["beta"], eff["c"]
            b = (k + (k + be) * cc) / (1 - cc)
            c = cc * k * (k + be - 1) / (1 - cc) ** 2
        else:
            p, N = eff["p"], eff["N"]
            b = p * (N - k) + k * (1 - p)
            c = k * (N - k + 1) * p * (1 - p)
        nxt = L_dense @ bases[-1] - b * bases[-1]
        if k > 0:
            nxt = nxt - c * bases[-2]
        bases.append(nxt)
    cols = []
    for k, bmat in enumerate(bases):
        if layer.use_layernorm:
            mu = bmat.mean(axis=1, keepdims=True)
            var = bmat.var(axis=1, keepdims=True)
            xhat = (bmat - mu) / np.sqrt(var + LN_EPS)
            cols.append(layer.params[f"ln_gamma.{k}"] * xhat
                        + layer.params[f"ln_beta.{k}"])
        else:
            cols.append(bmat)
    z = np.concatenate(cols, axis=1)
    return z @ layer.params["W"] + layer.params["bias"]


def suite_dense_oracle(tol: float = 1e-10) -> SuiteReport:
    rep = SuiteReport("dense_conv_oracle")
    rng = np.random.default_rng(21)
    for family in basis.FAMILY_NAMES:
        for trial in range(3):
            n = int(rng.integers(4, 32))
            adj = symmetrize_dedup(_random_graph(rng, n, 3 * n))
            L = laplacian_scaled(adj)
            from .sparse import chebyshev_operator
            op = chebyshev_operator(L) if family == "chebyshev" else L
            f_in, f_out, K = 6, 5, 3
            layer = PolyConvLayer(family, K, f_in, f_out,
                                  np.random.default_rng(trial))
            # randomize the affine so the oracle exercises gamma/beta too
            for k in range(K):
                layer.params[f"ln_gamma.{k}"] = 1 + 0.2 * rng.standard_normal((1, f_in))
                layer.params[f"ln_beta.{k}"] = 0.2 * rng.standard_normal((1, f_in))
            x = rng.standard_normal((n, f_in))
            got = conv_forward(layer, op, ad.constant(x)).data
            want = dense_conv_oracle(layer, op.toarray(), x)
            err = np.max(np.abs(got - want))
            rep.check(err <= tol, f"{family} trial {trial}: abs err {err:.2e}")
    return rep


def run_all() -> list[SuiteReport]:
    return [
        suite_laguerre_recurrence(),
        suite_orthogonality(),
        suite_gradient_checks(),
        suite_dense_oracle(),
    ]
