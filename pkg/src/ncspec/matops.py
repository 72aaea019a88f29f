"""Dense finite-dimensional operators and their spectral data.

Operators are plain numpy arrays wrapped in small validated containers.
The eigensolver backend is selectable: ``"auto"`` (LAPACK, with a banded
fast path for the Fourier-truncated models, which are tri- or
pentadiagonal), ``"lapack"`` (always dense LAPACK) or ``"jacobi"``
(:func:`ncspec.jacobi.jacobi_eigh`).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from .errors import InsufficientDataError, InvalidInputError
from .jacobi import jacobi_eigh
from .spectra import (Kind, MeasurabilityReport, SpectralSequence, log_mean_series,
                      sort_sequence, split_signed, tauberian_limit)

__all__ = [
    "HermitianOperator",
    "GeneralOperator",
    "Embedding",
    "bandwidth",
    "eigh",
    "hermitian_eig",
    "general_eigvals",
    "singular_values",
    "operator_norm",
    "apply_function",
    "sqrt_psd",
    "partial_inverse_sqrt",
    "positive_negative_parts",
    "counting_function",
    "pushforward",
    "additivity_residual",
    "real_imaginary_parts",
    "commutator_logmean",
    "family_mean",
    "load_matrix_json",
    "save_matrix_json",
]

HERMITIAN_RTOL = 1e-12
RANK_RTOL = 1e-10
BANDED_MAX_WIDTH = 16


def _square(entries):
    a = np.asarray(entries)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidInputError(f"expected a nonempty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    if np.iscomplexobj(a):
        if not np.any(a.imag):
            return a.real.astype(float)
        return a.astype(complex)
    return a.astype(float)


@dataclass(frozen=True, eq=False)
class GeneralOperator:
    """A square matrix acting on ``C^dim`` in a fixed orthonormal basis."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _square(self.entries))

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def H(self):
        return GeneralOperator(self.entries.conj().T)


@dataclass(frozen=True, eq=False)
class HermitianOperator(GeneralOperator):
    """A self-adjoint matrix; symmetrized exactly after validation."""

    def __post_init__(self):
        a = _square(self.entries)
        scale = np.max(np.abs(a))
        if np.max(np.abs(a - a.conj().T)) > HERMITIAN_RTOL * max(scale, np.finfo(float).tiny):
            raise InvalidInputError("matrix is not Hermitian within 1e-12 relative tolerance")
        a = 0.5 * (a + a.conj().T)
        object.__setattr__(self, "entries", a)

    @classmethod
    def diagonal(cls, values):
        return cls(np.diag(np.asarray(values, dtype=float)))


def _hermitian(op, what):
    if isinstance(op, HermitianOperator):
        return op
    entries = op.entries if isinstance(op, GeneralOperator) else op
    try:
        return HermitianOperator(entries)
    except InvalidInputError as exc:
        raise InvalidInputError(f"{what}: {exc}") from None


def _general(op):
    return op if isinstance(op, GeneralOperator) else GeneralOperator(op)


@dataclass(frozen=True, eq=False)
class Embedding:
    """Injective linear map ``C^source_dim -> C^target_dim`` (full column rank)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        m = m.astype(complex) if np.iscomplexobj(m) else m.astype(float)
        if m.ndim != 2 or m.shape[1] == 0 or m.shape[1] > m.shape[0]:
            raise InvalidInputError(f"embedding must be target x source with source <= target, got {m.shape}")
        s = sla.svdvals(m)
        if s[-1] <= RANK_RTOL * s[0]:
            raise InvalidInputError("embedding is rank deficient")
        object.__setattr__(self, "matrix", m)

    @property
    def source_dim(self):
        return self.matrix.shape[1]

    @property
    def target_dim(self):
        return self.matrix.shape[0]


# ---------------------------------------------------------------- eigensolvers

def bandwidth(a):
    """Largest ``d`` with a nonzero entry on the ``d``-th super-diagonal."""
    a = np.asarray(a)
    n = a.shape[0]
    nz = a != 0
    rows = np.flatnonzero(nz.any(axis=1))
    if rows.size == 0:
        return 0
    last = n - 1 - np.argmax(nz[rows, ::-1], axis=1)
    return int(max(0, np.max(last - rows)))


def _to_lower_band(a, b):
    n = a.shape[0]
    band = np.zeros((b + 1, n), dtype=a.dtype)
    for d in range(b + 1):
        band[d, : n - d] = np.diagonal(a, -d)
    return band


def eigh(A, method="auto", vectors=True):
    """Ascending eigenvalues (and eigenvectors as columns) of a Hermitian operator."""
    A = _hermitian(A, "eigh")
    a = A.entries
    if method == "jacobi":
        return jacobi_eigh(a, vectors=vectors)
    if method not in ("auto", "lapack"):
        raise InvalidInputError(f"unknown eigensolver {method!r}")
    if method == "auto":
        b = bandwidth(a)
        if b == 0:
            w = np.real(np.diag(a)).copy()
            order = np.argsort(w, kind="stable")
            v = np.eye(a.shape[0], dtype=a.dtype)[:, order] if vectors else None
            return w[order], v
        if b <= BANDED_MAX_WIDTH and 4 * b < a.shape[0]:
            band = _to_lower_band(a, b)
            if vectors:
                return sla.eig_banded(band, lower=True)
            return sla.eigvals_banded(band, lower=True), None
    if vectors:
        return sla.eigh(a)
    return sla.eigvalsh(a), None


def hermitian_eig(A, method="auto"):
    """Real eigenvalue sequence of a Hermitian operator, nonincreasing modulus."""
    w, _ = eigh(A, method=method, vectors=False)
    return sort_sequence(w, Kind.EIGENVALUES)


def general_eigvals(A):
    """Unordered eigenvalues of an arbitrary square matrix (LAPACK ``geev``).

    Diagnostic helper for inequality checks on non-normal matrices; the
    measurability pipeline itself never needs non-normal spectra.
    """
    return sla.eigvals(_general(A).entries)


def singular_values(A, method="svd"):
    """Singular values ``mu_j(A)`` (eigenvalues of ``|A|``), nonincreasing.

    ``method="svd"`` uses LAPACK's SVD; ``method="gram"`` eigensolves
    ``A* A`` and takes square roots of the (clamped) eigenvalues.
    Hermitian inputs take the shortcut ``mu_j = |lambda_j|``.
    """
    if isinstance(A, HermitianOperator):
        w, _ = eigh(A, vectors=False)
        return SpectralSequence(np.sort(np.abs(w))[::-1], Kind.SINGULAR_VALUES)
    a = _general(A).entries
    if method not in ("svd", "gram"):
        raise InvalidInputError(f"unknown singular value method {method!r}")
    if bandwidth(a) == 0:
        return SpectralSequence(np.sort(np.abs(np.diag(a)))[::-1], Kind.SINGULAR_VALUES)
    if method == "svd":
        s = sla.svdvals(a)
    elif method == "gram":
        g = HermitianOperator(0.5 * ((a.conj().T @ a) + (a.conj().T @ a).conj().T))
        w, _ = eigh(g, vectors=False)
        s = np.sqrt(np.clip(w, 0.0, None))
    else:
        raise InvalidInputError(f"unknown singular value method {method!r}")
    return SpectralSequence(np.sort(s)[::-1], Kind.SINGULAR_VALUES)


def operator_norm(A):
    """Largest singular value."""
    s = singular_values(A)
    return float(s.values[0]) if len(s) else 0.0


# ------------------------------------------------------------ spectral calculus

def apply_function(A, fn, method="auto"):
    """``fn(A)`` by spectral calculus; ``fn`` acts on the eigenvalue array."""
    w, v = eigh(A, method=method, vectors=True)
    fw = np.asarray(fn(w))
    if np.iscomplexobj(fw) and np.any(fw.imag):
        out = (v * fw) @ v.conj().T
        return GeneralOperator(out)
    out = (v * np.real(fw)) @ v.conj().T
    return HermitianOperator(0.5 * (out + out.conj().T))


def sqrt_psd(A, method="auto"):
    """Square root of a positive semidefinite operator (negative eigenvalues clamped)."""
    return apply_function(A, lambda w: np.sqrt(np.clip(w, 0.0, None)), method=method)


def partial_inverse_sqrt(A, rtol=1e-10, method="auto"):
    """``A^{-1/2}`` on the orthogonal complement of the kernel, 0 on the kernel.

    Eigenvalues below ``rtol * ||A||`` count as kernel.
    """
    A = _hermitian(A, "partial_inverse_sqrt")
    w, v = eigh(A, method=method, vectors=True)
    scale = np.max(np.abs(w)) if w.size else 0.0
    if np.any(w < -rtol * scale):
        raise InvalidInputError("partial_inverse_sqrt needs a positive semidefinite operator")
    keep = w > rtol * scale
    fw = np.zeros_like(w)
    fw[keep] = w[keep] ** -0.5
    out = (v * fw) @ v.conj().T
    return HermitianOperator(0.5 * (out + out.conj().T))


def positive_negative_parts(A, method="auto"):
    """``(A+, A-)`` with ``A = A+ - A-``, both positive semidefinite, ``A+ A- = 0``."""
    A = _hermitian(A, "positive_negative_parts")
    w, v = eigh(A, method=method, vectors=True)
    plus = (v * np.clip(w, 0.0, None)) @ v.conj().T
    minus = (v * np.clip(-w, 0.0, None)) @ v.conj().T
    return (HermitianOperator(0.5 * (plus + plus.conj().T)),
            HermitianOperator(0.5 * (minus + minus.conj().T)))


def counting_function(A, lam, sign="+"):
    """``N^{+-}(A; lam) = #{j : lambda_j^{+-}(A) > lam}``.

    ``A`` may be a Hermitian operator or an already computed real
    :class:`SpectralSequence`.
    """
    if lam <= 0:
        raise InvalidInputError("counting threshold must be positive")
    if sign not in ("+", "-"):
        raise InvalidInputError("sign must be '+' or '-'")
    seq = A if isinstance(A, SpectralSequence) else hermitian_eig(A)
    if seq.kind is not Kind.EIGENVALUES:
        # already one-signed magnitudes; singular values count as the + side
        side = "-" if seq.kind is Kind.SIGNED_NEGATIVE else "+"
        return int(np.count_nonzero(seq.values > lam)) if side == sign else 0
    plus, minus = split_signed(seq)
    part = plus if sign == "+" else minus
    return int(np.count_nonzero(part.values > lam))


# -------------------------------------------------------------- constructions

def pushforward(A, iota):
    """``iota_* A = iota A (iota^{-1} pi)`` with ``pi`` the projection onto ``ran(iota)``.

    ``iota^{-1} pi`` is the Moore-Penrose pseudo-inverse of the embedding
    matrix, so the result acts as ``A`` (transported) on the range and as 0
    on its orthogonal complement.
    """
    A = _general(A)
    if not isinstance(iota, Embedding):
        iota = Embedding(iota)
    if A.dim != iota.source_dim:
        raise InvalidInputError(f"operator dim {A.dim} != embedding source dim {iota.source_dim}")
    j = iota.matrix
    left_inverse = np.linalg.pinv(j, rcond=RANK_RTOL)
    return GeneralOperator(j @ A.entries @ left_inverse)


def _signed_partial_sums(A):
    return np.cumsum(hermitian_eig(A).values)


def additivity_residual(A, B, N_range=None):
    """``|S_N(A+B) - S_N(A) - S_N(B)|`` with ``S_N`` the sum of the first ``N`` eigenvalues.

    Only Hermitian operators are accepted (eigenvalues in nonincreasing
    modulus order).  ``N_range`` defaults to ``1..dim``.
    """
    A = _hermitian(A, "additivity_residual")
    B = _hermitian(B, "additivity_residual")
    if A.dim != B.dim:
        raise InvalidInputError(f"dimension mismatch {A.dim} != {B.dim}")
    n = A.dim
    N = np.arange(1, n + 1) if N_range is None else np.asarray(list(N_range), dtype=int)
    if N.size and (N.min() < 1 or N.max() > n):
        raise InvalidInputError(f"N_range must lie in 1..{n}")
    sab = _signed_partial_sums(HermitianOperator(A.entries + B.entries))
    sa = _signed_partial_sums(A)
    sb = _signed_partial_sums(B)
    return np.abs(sab[N - 1] - sa[N - 1] - sb[N - 1])


def real_imaginary_parts(A):
    """``(Re A, Im A)`` with ``A = Re A + i Im A``, both Hermitian."""
    a = _general(A).entries
    re = 0.5 * (a + a.conj().T)
    im = (a - a.conj().T) / 2j
    return HermitianOperator(re), HermitianOperator(im)


def commutator_logmean(T, A, window_fraction=0.5, tol=1e-2):
    """Log-mean diagnostic of the commutator ``[T, A] = TA - AT``.

    The log-means are formed from the eigenvalue sequences of the real and
    imaginary parts.  The expected limit is 0; ``remainder_bound`` holds
    ``max_N |S_N(Re) + i S_N(Im)|``.
    """
    T = _general(T)
    A = _general(A)
    if T.dim != A.dim:
        raise InvalidInputError(f"dimension mismatch {T.dim} != {A.dim}")
    c = T.entries @ A.entries - A.entries @ T.entries
    if not np.any(c):
        n = A.dim
        return MeasurabilityReport(limit_estimate=0.0, converged=True, window=(1, n),
                                   dispersion=0.0, surrogate_spread=0.0, tol=tol, length=n,
                                   remainder_bound=0.0, notes=("commutator vanishes",))
    re, im = real_imaginary_parts(c)
    seq_re, seq_im = hermitian_eig(re), hermitian_eig(im)
    if len(seq_re) < 16:
        raise InsufficientDataError("commutator diagnostic needs dim >= 16")
    rep_re = tauberian_limit(seq_re, window_fraction, tol, reference=0.0)
    rep_im = tauberian_limit(seq_im, window_fraction, tol, reference=0.0)
    sigma = log_mean_series(seq_re) + 1j * log_mean_series(seq_im)
    first, last = rep_re.window
    window = sigma[first - 1:last]
    estimate = window.mean()
    dispersion = float(np.max(np.abs(window - estimate)))
    return MeasurabilityReport(
        limit_estimate=complex(estimate),
        converged=dispersion <= tol,
        window=(first, last),
        dispersion=dispersion,
        surrogate_spread=max(rep_re.surrogate_spread, rep_im.surrogate_spread),
        tol=tol,
        length=len(seq_re),
        remainder_bound=float(np.hypot(rep_re.remainder_bound, rep_im.remainder_bound)),
    )


def family_mean(family):
    """``sum_i w_i A_i`` for a finite list of ``(weight, operator)`` pairs."""
    family = list(family)
    if not family:
        raise InvalidInputError("empty operator family")
    dims = {_general(op).dim for _, op in family}
    if len(dims) != 1:
        raise InvalidInputError(f"dimension mismatch in family: {sorted(dims)}")
    weights = [float(w) for w, _ in family]
    if any(w < 0 or not np.isfinite(w) for w in weights):
        raise InvalidInputError("weights must be finite and nonnegative")
    total = sum(w * _general(op).entries for w, (_, op) in zip(weights, family))
    if all(isinstance(op, HermitianOperator) for _, op in family):
        return HermitianOperator(total)
    return GeneralOperator(total)


# ------------------------------------------------------------------------ I/O

def save_matrix_json(A, path):
    """Write ``{dim, entries: row-major [[re, im], ...]}``."""
    a = np.asarray(_general(A).entries, dtype=complex)
    doc = {"dim": int(a.shape[0]),
           "entries": [[float(z.real), float(z.imag)] for z in a.reshape(-1)]}
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_matrix_json(path, hermitian=None):
    """Read a matrix file; returns a Hermitian operator when the data is Hermitian.

    ``hermitian=True`` forces validation (raising on failure), ``False``
    always returns a :class:`GeneralOperator`.
    """
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    extra = set(doc) - {"dim", "entries"}
    if extra:
        raise InvalidInputError(f"unknown keys in matrix file: {sorted(extra)}")
    dim = int(doc["dim"])
    flat = np.asarray(doc["entries"], dtype=float)
    if flat.shape != (dim * dim, 2):
        raise InvalidInputError(f"expected {dim * dim} [re, im] pairs")
    a = (flat[:, 0] + 1j * flat[:, 1]).reshape(dim, dim)
    if hermitian is False:
        return GeneralOperator(a)
    if hermitian is True:
        return HermitianOperator(a)
    try:
        return HermitianOperator(a)
    except InvalidInputError:
        return GeneralOperator(a)
