"""Recurrence-coefficient providers for the four polynomial families and
generation of the stabilized feature bases on the tape.

All families except Chebyshev use the monic three-term recurrence
P_{k+1}(x) = (x - b_k) P_k(x) - c_k P_{k-1}(x); the learnable shape parameters
enter through b_k and c_k, so gradients flow from the loss back into them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .sparse import CsrMatrix

FAMILY_NAMES = ("chebyshev", "laguerre", "meixner", "krawtchouk")


@dataclass
class Chebyshev:
    pass


@dataclass
class Laguerre:
    alpha_raw: Tensor  # alpha = softplus(alpha_raw) - 0.99 > -0.99


@dataclass
class Meixner:
    beta_raw: Tensor   # beta = softplus(beta_raw) > 0
    c_raw: Tensor      # c = sigmoid(c_raw) in (0, 1)


@dataclass
class Krawtchouk:
    p_raw: Tensor      # p = sigmoid(p_raw) in (0, 1)
    N: int             # fixed hyperparameter, not learned


BasisFamily = Chebyshev | Laguerre | Meixner | Krawtchouk


def effective_params(f: BasisFamily) -> dict[str, Tensor]:
    """Constrained shape parameters as tape scalars."""
    if isinstance(f, Chebyshev):
        return {}
    if isinstance(f, Laguerre):
        return {"alpha": ad.s_sub(ad.softplus_s(f.alpha_raw), 0.99)}
    if isinstance(f, Meixner):
        return {"beta": ad.softplus_s(f.beta_raw), "c": ad.sigmoid_s(f.c_raw)}
    if isinstance(f, Krawtchouk):
        return {"p": ad.sigmoid_s(f.p_raw)}
    raise TypeError(f"unknown family: {f!r}")


def recurrence_coeffs(f: BasisFamily, k: int,
                      eff: dict[str, Tensor] | None = None):
    """(b_k, c_k) for the monic recurrence; (None, None) sentinel for Chebyshev."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if eff is None:
        eff = effective_params(f)
    if isinstance(f, Chebyshev):
        return (None, None)
    if isinstance(f, Laguerre):
        alpha = eff["alpha"]
        b = ad.s_add(alpha, 2 * k + 1)
        c = ad.s_mul(ad.s_add(alpha, k), float(k))
        return (b, c)
    if isinstance(f, Meixner):
        beta, c = eff["beta"], eff["c"]
        one_minus_c = ad.s_sub(1.0, c)
        b = ad.s_div(ad.s_add(float(k), ad.s_mul(ad.s_add(beta, float(k)), c)),
                     one_minus_c)
        ck = ad.s_div(ad.s_mul(ad.s_mul(c, float(k)), ad.s_add(beta, float(k - 1))),
                      ad.s_mul(one_minus_c, one_minus_c))
        return (b, ck)
    if isinstance(f, Krawtchouk):
        if k > f.N:
            raise ValueError(f"Krawtchouk index k={k} exceeds N={f.N}")
        p = eff["p"]
        b = ad.s_add(ad.s_mul(p, float(f.N - k)),
                     ad.s_mul(ad.s_sub(1.0, p), float(k)))
        ck = ad.s_mul(ad.s_mul(p, ad.s_sub(1.0, p)), float(k * (f.N - k + 1)))
        return (b, ck)
    raise TypeError(f"unknown family: {f!r}")


def generate_bases(f: BasisFamily, L: CsrMatrix, x: Tensor, K: int) -> list[Tensor]:
    """[P_0(L)x, ..., P_{K-1}(L)x], recorded on the tape.

    For monic families L is the scaled Laplacian (spectrum [0, 1]); for
    Chebyshev it is the shifted operator with spectrum in [-1, 1].
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if isinstance(f, Krawtchouk) and K > f.N + 1:
        raise ValueError(f"K={K} exceeds Krawtchouk N+1={f.N + 1}")
    bases = [x]
    if K == 1:
        return bases
    if isinstance(f, Chebyshev):
        bases.append(ad.spmm_const(L, x))
        for _ in range(2, K):
            y = ad.scale(ad.spmm_const(L, bases[-1]), 2.0)
            bases.append(ad.scalar_affine_combine(y, bases[-2], 1.0))
        return bases
    eff = effective_params(f)
    b0, _ = recurrence_coeffs(f, 0, eff)
    bases.append(ad.scalar_affine_combine(ad.spmm_const(L, x), x, b0))
    for k in range(1, K - 1):
        bk, ck = recurrence_coeffs(f, k, eff)
        bases.append(ad.scalar_affine_combine(
            ad.spmm_const(L, bases[-1]), bases[-1], bk, bases[-2], ck))
    return bases


def monic_laguerre_reference(k: int, alpha: float, x: float) -> float:
    """Degree-k monic generalized Laguerre polynomial by explicit expansion.

    Test oracle: unrolls the recurrence on exact Fraction coefficients (floats
    are exact rationals), then evaluates by Horner. Independent of the tape.
    """
    if k > 6:
        raise ValueError("reference oracle supports k <= 6")
    a = Fraction(alpha)
    p_prev = [Fraction(1)]                      # P_0 = 1
    if k == 0:
        return 1.0
    p_cur = [-(a + 1), Fraction(1)]             # P_1 = x - (alpha + 1)
    for j in range(1, k):
        b = 2 * j + a + 1
        c = j * (j + a)
        # P_{j+1} = (x - b) P_j - c P_{j-1}
        nxt = [Fraction(0)] * (j + 2)
        for i, coef in enumerate(p_cur):
            nxt[i + 1] += coef
            nxt[i] -= b * coef
        for i, coef in enumerate(p_prev):
            nxt[i] -= c * coef
        p_prev, p_cur = p_cur, nxt
    acc = 0.0
    for coef in reversed(p_cur):
        acc = acc * x + float(coef)
    return acc


def shape_param_names(kind: str) -> list[str]:
    """Raw learnable parameter names for a family kind string."""
    return {
        "chebyshev": [],
        "laguerre": ["alpha_raw"],
        "meixner": ["beta_raw", "c_raw"],
        "krawtchouk": ["p_raw"],
    }[kind]


def initial_raw_params(kind: str) -> dict[str, float]:
    """Neutral starting points: alpha=0, beta=1, c=0.5, p=0.5."""
    inv_softplus = lambda y: float(np.log(np.expm1(y)))  # noqa: E731
    return {
        "chebyshev": {},
        "laguerre": {"alpha_raw": inv_softplus(0.99)},
        "meixner": {"beta_raw": inv_softplus(1.0), "c_raw": 0.0},
        "krawtchouk": {"p_raw": 0.0},
    }[kind]


def make_family(kind: str, raw: dict[str, Tensor], krawtchouk_n: int = 10) -> BasisFamily:
    """Assemble a family instance from raw-parameter tensors."""
    if kind == "chebyshev":
        return Chebyshev()
    if kind == "laguerre":
        return Laguerre(alpha_raw=raw["alpha_raw"])
    if kind == "meixner":
        return Meixner(beta_raw=raw["beta_raw"], c_raw=raw["c_raw"])
    if kind == "krawtchouk":
        return Krawtchouk(p_raw=raw["p_raw"], N=krawtchouk_n)
    raise ValueError(f"unknown family kind: {kind!r}")
