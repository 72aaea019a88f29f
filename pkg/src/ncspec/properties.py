"""Randomized checks of the singular value and eigenvalue inequalities.

Each ``*_excess`` function returns the largest amount by which an
inequality is violated on one sample, relative to the tolerance
``1e-10 * scale``; a value ``<= 0`` means the inequality held.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matops import (GeneralOperator, HermitianOperator, general_eigvals, hermitian_eig,
                     operator_norm, singular_values)
from .spectra import sort_sequence, split_signed, weak_quasi_norm

__all__ = [
    "random_unitary",
    "random_hermitian",
    "random_general",
    "random_psd",
    "weak_trace_hermitian",
    "ky_fan_excess",
    "signed_ky_fan_excess",
    "ideal_excess",
    "quasi_triangle_excess",
    "weyl_sum_excess",
    "PropertyResult",
    "run_property_suite",
]

RTOL = 1e-10
PROPERTIES = ("ky_fan", "signed_ky_fan", "ideal", "quasi_triangle", "weyl_sums")


def random_unitary(rng, dim, real=False):
    """Haar-distributed unitary (orthogonal when ``real``) via QR with phase fix."""
    z = rng.standard_normal((dim, dim))
    if not real:
        z = z + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def random_hermitian(rng, dim, eigenvalues=None, real=False):
    """``U diag(eigenvalues) U*``; GUE-like spectrum when none is given."""
    if eigenvalues is None:
        g = rng.standard_normal((dim, dim))
        if not real:
            g = g + 1j * rng.standard_normal((dim, dim))
        return HermitianOperator(0.5 * (g + g.conj().T))
    u = random_unitary(rng, dim, real=real)
    a = (u * np.asarray(eigenvalues, dtype=float)[None, :]) @ u.conj().T
    return HermitianOperator(0.5 * (a + a.conj().T))


def random_general(rng, dim):
    return GeneralOperator(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))


def random_psd(rng, dim, rank=None):
    """Random positive semidefinite matrix of the given rank (full by default)."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    return HermitianOperator(g @ g.conj().T / max(rank, 1))


def weak_trace_hermitian(rng, dim, real=True):
    """Hermitian matrix with eigenvalues ``+-u_j / (j+1)``, ``u_j`` uniform in ``[1/2, 3/2]``."""
    j = np.arange(dim)
    eig = rng.choice([-1.0, 1.0], size=dim) * rng.uniform(0.5, 1.5, size=dim) / (j + 1.0)
    return random_hermitian(rng, dim, eig, real=real)


def _mu(op):
    return singular_values(op).values


def _tolerance(*scales):
    return RTOL * max(1.0, *scales)


def ky_fan_excess(S, T):
    """``max_{j+k<n} mu_{j+k}(S+T) - mu_j(S) - mu_k(T)``, minus tolerance."""
    total = GeneralOperator(S.entries + T.entries)
    ms, mt, mst = _mu(S), _mu(T), _mu(total)
    n = ms.size
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    mask = j + k < n
    gap = mst[(j + k)[mask]] - ms[j[mask]] - mt[k[mask]]
    return float(gap.max() - _tolerance(ms[0], mt[0]))


def _padded(part, n):
    out = np.zeros(n)
    out[:len(part)] = part.values
    return out


def signed_ky_fan_excess(A, B):
    """Ky Fan inequality for ``lambda^+`` and for ``lambda^-`` of Hermitian ``A, B``."""
    n = A.dim
    pa, ma = split_signed(hermitian_eig(A))
    pb, mb = split_signed(hermitian_eig(B))
    pab, mab = split_signed(hermitian_eig(HermitianOperator(A.entries + B.entries)))
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    mask = j + k < n
    worst = -np.inf
    for x, y, z in ((pa, pb, pab), (ma, mb, mab)):
        x, y, z = _padded(x, n), _padded(y, n), _padded(z, n)
        worst = max(worst, float((z[(j + k)[mask]] - x[j[mask]] - y[k[mask]]).max()))
    scale = max(abs(hermitian_eig(A).values[0]), abs(hermitian_eig(B).values[0]))
    return worst - _tolerance(scale)


def ideal_excess(A, T, B):
    """``max_j mu_j(A T B) - ||A|| mu_j(T) ||B||``, minus tolerance."""
    na, nb = operator_norm(A), operator_norm(B)
    bound = na * nb * _mu(T)
    prod = GeneralOperator(A.entries @ T.entries @ B.entries)
    return float((_mu(prod) - bound).max() - _tolerance(bound[0]))


def quasi_triangle_excess(S, T, p):
    """``||S+T||_{p,inf} - 2^{1/p} (||S||_{p,inf} + ||T||_{p,inf})``, minus tolerance."""
    ns = weak_quasi_norm(singular_values(S), p)
    nt = weak_quasi_norm(singular_values(T), p)
    nst = weak_quasi_norm(singular_values(GeneralOperator(S.entries + T.entries)), p)
    bound = 2.0 ** (1.0 / p) * (ns + nt)
    return float(nst - bound - _tolerance(bound))


def weyl_sum_excess(A):
    """``|sum_{j<N} lambda_j| <= sum_{j<N} |lambda_j| <= sum_{j<N} mu_j`` for all ``N``.

    Eigenvalues of the (generally non-normal) ``A`` come from LAPACK.
    """
    lam = sort_sequence(general_eigvals(A)).values
    mu = _mu(A)
    s_abs = np.cumsum(np.abs(lam))
    first = np.abs(np.cumsum(lam)) - s_abs
    second = s_abs - np.cumsum(mu)
    return float(max(first.max(), second.max()) - _tolerance(mu.sum()))


@dataclass(frozen=True)
class PropertyResult:
    name: str
    checks: int
    violations: int
    max_excess: float


def run_property_suite(n_pairs=200, max_dim=64, seed=0, p_values=(0.5, 1.0, 2.0)):
    """Draw ``n_pairs`` random Hermitian pairs and check all five inequalities.

    For a pair ``(S, T)`` the general operator ``G = S + iT`` (non-normal)
    feeds the ideal inequality ``mu(S T G)`` and the Weyl sums.
    """
    rng = np.random.default_rng(seed)
    counts = {name: [0, 0, -np.inf] for name in PROPERTIES}

    def record(name, excess):
        c = counts[name]
        c[0] += 1
        c[1] += excess > 0
        c[2] = max(c[2], excess)

    for _ in range(n_pairs):
        dim = int(rng.integers(2, max_dim + 1))
        S = random_hermitian(rng, dim)
        T = random_hermitian(rng, dim)
        G = GeneralOperator(S.entries + 1j * T.entries)
        record("ky_fan", ky_fan_excess(S, T))
        record("signed_ky_fan", signed_ky_fan_excess(S, T))
        record("ideal", ideal_excess(S, T, G))
        for p in p_values:
            record("quasi_triangle", quasi_triangle_excess(S, T, p))
        record("weyl_sums", weyl_sum_excess(G))
    return [PropertyResult(name, c[0], int(c[1]), float(c[2])) for name, c in counts.items()]
