import numpy as np
import pytest
from scipy.special import roots_genlaguerre

from polyfilter import autodiff as ad
from polyfilter import basis
from polyfilter.selftest import fd_grad
from polyfilter.sparse import CsrMatrix, EdgeList, laplacian_scaled, symmetrize_dedup


def inv_softplus(y):
    return float(np.log(np.expm1(y)))


def laguerre(alpha, tape=None):
    raw = inv_softplus(alpha + 0.99)
    t = tape.leaf([[raw]]) if tape else ad.constant(raw)
    return basis.Laguerre(alpha_raw=t)


def scalar_op(v):
    return CsrMatrix(1, 1, [0, 1], [0], [v])


class TestEffectiveParams:
    def test_laguerre_alpha_at_zero_raw(self):
        fam = basis.Laguerre(alpha_raw=ad.constant(0.0))
        alpha = basis.effective_params(fam)["alpha"].item()
        assert alpha == pytest.approx(np.log(2) - 0.99, abs=1e-9)

    def test_laguerre_alpha_lower_bound(self):
        fam = basis.Laguerre(alpha_raw=ad.constant(-40.0))
        alpha = basis.effective_params(fam)["alpha"].item()
        assert alpha > -1.0
        assert alpha == pytest.approx(-0.99, abs=1e-12)

    def test_meixner_c_at_zero_raw(self):
        fam = basis.Meixner(beta_raw=ad.constant(0.0), c_raw=ad.constant(0.0))
        eff = basis.effective_params(fam)
        assert eff["c"].item() == pytest.approx(0.5)
        assert eff["beta"].item() == pytest.approx(np.log(2))

    def test_constraints_hold_by_construction(self):
        rng = np.random.default_rng(0)
        for raw in rng.standard_normal(20) * 10:
            lag = basis.effective_params(
                basis.Laguerre(alpha_raw=ad.constant(raw)))
            assert lag["alpha"].item() > -0.99 - 1e-12
            mei = basis.effective_params(
                basis.Meixner(beta_raw=ad.constant(raw), c_raw=ad.constant(raw)))
            assert mei["beta"].item() > 0
            assert 0 < mei["c"].item() < 1
            kra = basis.effective_params(
                basis.Krawtchouk(p_raw=ad.constant(raw), N=10))
            assert 0 < kra["p"].item() < 1


class TestRecurrenceCoeffs:
    def test_laguerre_k1_alpha0(self):
        b, c = basis.recurrence_coeffs(laguerre(0.0), 1)
        assert b.item() == pytest.approx(3.0, abs=1e-9)
        assert c.item() == pytest.approx(1.0, abs=1e-9)

    def test_laguerre_k0_c_is_zero(self):
        for alpha in (-0.5, 0.0, 2.0):
            b, c = basis.recurrence_coeffs(laguerre(alpha), 0)
            assert b.item() == pytest.approx(alpha + 1, abs=1e-9)
            assert c.item() == 0.0

    def test_krawtchouk_k1(self):
        fam = basis.Krawtchouk(p_raw=ad.constant(0.0), N=10)  # p = 0.5
        _, c = basis.recurrence_coeffs(fam, 1)
        assert c.item() == pytest.approx(1 * 10 * 0.25)

    def test_meixner_k2(self):
        fam = basis.Meixner(beta_raw=ad.constant(inv_softplus(1.0)),
                            c_raw=ad.constant(0.0))  # beta=1, c=0.5
        _, c = basis.recurrence_coeffs(fam, 2)
        assert c.item() == pytest.approx(0.5 * 2 * 2 / 0.25)

    def test_krawtchouk_k_beyond_n(self):
        fam = basis.Krawtchouk(p_raw=ad.constant(0.0), N=4)
        with pytest.raises(ValueError):
            basis.recurrence_coeffs(fam, 5)

    def test_chebyshev_sentinel(self):
        assert basis.recurrence_coeffs(basis.Chebyshev(), 3) == (None, None)

    def test_laguerre_quadratic_growth(self):
        # c_k / k^2 -> 1; at k=50 with alpha=0 it is within 5%
        _, c = basis.recurrence_coeffs(laguerre(0.0), 50)
        assert abs(c.item() / 50 ** 2 - 1) <= 0.05

    def test_krawtchouk_coefficients_bounded(self):
        fam = basis.Krawtchouk(p_raw=ad.constant(0.0), N=10)  # p = 0.5
        cs = [basis.recurrence_coeffs(fam, k)[1].item() for k in range(11)]
        assert max(cs) <= 10 * 12 / 4


class TestGenerateBases:
    def test_k1_any_family(self):
        x = ad.constant([[1.0, 2.0], [3.0, 4.0]])
        L = laplacian_scaled(symmetrize_dedup(EdgeList(2, [(0, 1)])))
        for fam in (basis.Chebyshev(), laguerre(0.0),
                    basis.Meixner(beta_raw=ad.constant(0.0), c_raw=ad.constant(0.0)),
                    basis.Krawtchouk(p_raw=ad.constant(0.0), N=10)):
            out = basis.generate_bases(fam, L, x, 1)
            assert len(out) == 1
            assert out[0] is x

    def test_scalar_laguerre_expansion(self):
        got = [t.item() for t in basis.generate_bases(
            laguerre(0.0), scalar_op(0.5), ad.constant(1.0), 3)]
        np.testing.assert_allclose(got, [1.0, -0.5, 0.25], atol=1e-12)

    def test_scalar_chebyshev(self):
        got = [t.item() for t in basis.generate_bases(
            basis.Chebyshev(), scalar_op(0.5), ad.constant(1.0), 3)]
        np.testing.assert_allclose(got, [1.0, 0.5, -0.5], atol=1e-12)

    def test_krawtchouk_k_cap(self):
        fam = basis.Krawtchouk(p_raw=ad.constant(0.0), N=3)
        with pytest.raises(ValueError):
            basis.generate_bases(fam, scalar_op(0.5), ad.constant(1.0), 5)

    def test_oracle_equivalence(self):
        # k <= 5, four alphas, 20 points of [0, 1], <= 1e-10 relative
        for alpha in (-0.5, 0.0, 1.0, 2.5):
            for x in np.linspace(0, 1, 20):
                got = basis.generate_bases(laguerre(alpha), scalar_op(x),
                                           ad.constant(1.0), 6)
                for k, t in enumerate(got):
                    want = basis.monic_laguerre_reference(k, alpha, float(x))
                    assert abs(t.item() - want) <= 1e-10 * max(1, abs(want))


class TestMonicLaguerreReference:
    def test_degree_zero(self):
        assert basis.monic_laguerre_reference(0, 1.7, 0.3) == 1.0

    def test_degree_one(self):
        assert basis.monic_laguerre_reference(1, 0.5, 2.0) == pytest.approx(0.5)

    def test_degree_two_matches_scalar_graph(self):
        assert basis.monic_laguerre_reference(2, 0.0, 0.5) == pytest.approx(0.25)

    def test_orthogonality_under_gauss_laguerre(self):
        for alpha in (0.0, 1.0):
            nodes, weights = roots_genlaguerre(64, alpha)
            vals = np.array([[basis.monic_laguerre_reference(k, alpha, float(x))
                              for x in nodes] for k in range(5)])
            gram = (vals * weights) @ vals.T
            norms = np.sqrt(np.diag(gram))
            for m in range(5):
                for n in range(m + 1, 5):
                    assert abs(gram[m, n]) / (norms[m] * norms[n]) <= 1e-8


class TestShapeParamGradients:
    def test_alpha_raw_gradient_on_random_graph(self):
        # d(loss)/d(alpha_raw) via tape vs central differences, K=4, 20 nodes
        rng = np.random.default_rng(12)
        edges = [(int(rng.integers(20)), int(rng.integers(20)))
                 for _ in range(40)]
        L = laplacian_scaled(symmetrize_dedup(EdgeList(20, edges)))
        x = rng.standard_normal((20, 3))
        proj = rng.standard_normal((3, 1))
        ones_row = np.ones((1, 20))

        def loss_from(fam_tensors):
            fam = basis.Laguerre(alpha_raw=fam_tensors["alpha_raw"])
            bs = basis.generate_bases(fam, L, ad.constant(x), 4)
            total = None
            for b in bs:
                s = ad.matmul(ad.constant(ones_row),
                              ad.matmul(b, ad.constant(proj)))
                total = s if total is None else ad.s_add(total, s)
            return total

        params = {"alpha_raw": np.array([[0.37]])}
        tape = ad.Tape()
        tensors = {"alpha_raw": tape.leaf(params["alpha_raw"])}
        loss = loss_from(tensors)
        analytic = tape.backward(loss)[tensors["alpha_raw"].node_id]

        def f(ps):
            tp = ad.Tape()
            return loss_from({"alpha_raw": tp.leaf(ps["alpha_raw"])}).item()

        fd = fd_grad(f, {k: v.copy() for k, v in params.items()})["alpha_raw"]
        assert np.max(np.abs(analytic - fd)) / max(np.max(np.abs(fd)), 1.0) <= 1e-4
