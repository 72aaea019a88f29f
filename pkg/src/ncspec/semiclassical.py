"""Birman-Schwinger counting for truncated form sums ``h^2 H - V``.

In finite dimensions the form sum is the plain matrix sum, so everything
here reduces to eigenvalue counts of Hermitian matrices.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .matops import HermitianOperator, bandwidth, eigh
from .spectra import MeasurabilityReport, sort_sequence, tauberian_limit
from .weyl import IntegralReport, weyl_to_integral

__all__ = [
    "FormPair",
    "SweepRow",
    "SweepReport",
    "birman_schwinger_operator",
    "negative_count",
    "sandwich_check",
    "semiclassical_sweep",
    "circle_pair",
]

KERNEL_RTOL = 1e-10
ZERO_RTOL = 1e-12
GUARD_FRACTION = 0.25


def _as_hermitian(a):
    return a if isinstance(a, HermitianOperator) else HermitianOperator(a)


@dataclass(frozen=True, eq=False)
class FormPair:
    """``H >= 0`` with a finite-dimensional kernel, and a Hermitian ``V``.

    ``kernel_dim`` counts eigenvalues of ``H`` at most ``1e-10 ||H||``;
    ``gap`` is the smallest eigenvalue above that threshold.
    """

    H: HermitianOperator
    V: HermitianOperator

    def __post_init__(self):
        H, V = _as_hermitian(self.H), _as_hermitian(self.V)
        if H.dim != V.dim:
            raise InvalidInputError("H and V must have the same dimension")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "V", V)
        w, vecs = eigh(H)
        norm = float(np.max(np.abs(w))) if w.size else 0.0
        if norm == 0:
            raise InvalidInputError("H = 0 has no spectral gap")
        if w[0] < -KERNEL_RTOL * norm:
            raise InvalidInputError("H is not positive semidefinite")
        kernel = w <= KERNEL_RTOL * norm
        object.__setattr__(self, "_eig", (w, vecs, kernel))
        object.__setattr__(self, "kernel_dim", int(np.count_nonzero(kernel)))
        object.__setattr__(self, "gap", float(w[~kernel][0]))

    @property
    def dim(self):
        return self.H.dim

    @property
    def h_diagonal(self):
        return bandwidth(self.H.entries) == 0

    def scaled(self, t):
        return FormPair(HermitianOperator(t * self.H.entries), HermitianOperator(t * self.V.entries))


def _inverse_sqrt_weights(pair):
    w, vecs, kernel = pair._eig
    d = np.zeros_like(w)
    d[~kernel] = 1.0 / np.sqrt(w[~kernel])
    return d, vecs


def birman_schwinger_operator(pair):
    """``K = H^{-1/2} V H^{-1/2}`` with the partial inverse (0 on ``ker H``)."""
    v = pair.V.entries
    if pair.h_diagonal:
        # diagonal H: scale rows and columns, no eigenbasis change
        diag = np.real(np.diag(pair.H.entries))
        norm = np.max(np.abs(diag))
        d = np.zeros_like(diag)
        nz = diag > KERNEL_RTOL * norm
        d[nz] = 1.0 / np.sqrt(diag[nz])
        return HermitianOperator(d[:, None] * v * d[None, :])
    d, vecs = _inverse_sqrt_weights(pair)
    root = (vecs * d[None, :]) @ vecs.conj().T
    return HermitianOperator(root @ v @ root)


def _count_below(entries, level=0.0):
    w, _ = eigh(HermitianOperator(entries), vectors=False)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    return int(np.count_nonzero(w < level - ZERO_RTOL * max(scale, abs(level))))


def negative_count(pair, h):
    """Number of negative eigenvalues of ``h^2 H + V``.

    ``V`` carries its own sign, so attractive wells are passed as ``-V``.
    Eigenvalues above ``-1e-12 * max|eig|`` are treated as zero.
    """
    if not h > 0:
        raise InvalidInputError("h must be positive")
    return _count_below(h * h * pair.H.entries + pair.V.entries)


def sandwich_check(pair):
    """Return ``(lower, mid, upper, holds)`` for the Birman-Schwinger bracket at ``h = 1``.

    ``lower = #{eig(K) < -1}``, ``mid = N^-(H + V)`` and ``upper = lower +
    dim ker H``.
    """
    K = birman_schwinger_operator(pair)
    lower = _count_below(K.entries, -1.0)
    mid = negative_count(pair, 1.0)
    upper = lower + pair.kernel_dim
    return lower, mid, upper, lower <= mid <= upper


@dataclass(frozen=True)
class SweepRow:
    h: float
    count: int
    h2count: float
    guard_ok: bool


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]
    limit: float
    integral: IntegralReport | None
    tauberian: MeasurabilityReport
    discrepancy: float
    excluded: tuple[float, ...]


def semiclassical_sweep(pair, h_list, n_extrapolate=3, floor=0.0, guard_fraction=GUARD_FRACTION):
    """Sweep ``h^2 N^-(h^2 H - V)`` over ``h_list`` for ``V >= 0``.

    Values of ``h`` whose count exceeds ``guard_fraction * dim`` are
    flagged ``guard_ok=False``, excluded from the extrapolation and
    reported with a warning.  The limit is the mean of ``h^2 N^-`` over the
    ``n_extrapolate`` smallest admissible ``h``.  ``floor`` is passed to
    the Weyl estimator for ``K``.
    """
    h_values = [float(h) for h in h_list]
    if not h_values or any(not h > 0 for h in h_values):
        raise InvalidInputError("h_list must be nonempty and positive")
    if any(b >= a for a, b in zip(h_values, h_values[1:])):
        raise InvalidInputError("h_list must be strictly decreasing")
    wv, _ = eigh(pair.V, vectors=False)
    vnorm = float(np.max(np.abs(wv)))
    if wv[0] < -KERNEL_RTOL * max(vnorm, 1.0):
        raise InvalidInputError("semiclassical_sweep needs V >= 0")
    limit_cap = guard_fraction * pair.dim
    flipped = FormPair(pair.H, HermitianOperator(-pair.V.entries))
    rows = []
    for h in h_values:
        count = negative_count(flipped, h)
        rows.append(SweepRow(h, count, h * h * count, count <= limit_cap))
    excluded = tuple(r.h for r in rows if not r.guard_ok)
    if excluded:
        warnings.warn(f"h values {excluded} violate the resolution guard "
                      f"N^- <= {guard_fraction} dim and are excluded", RuntimeWarning, stacklevel=2)
    good = [r for r in rows if r.guard_ok]
    limit = float(np.mean([r.h2count for r in good[-n_extrapolate:]])) if good else math.nan

    K = birman_schwinger_operator(pair)
    w, _ = eigh(K, vectors=False)
    seq = sort_sequence(w)
    taub = tauberian_limit(seq)
    integral = weyl_to_integral(seq, floor=floor) if vnorm > 0 else None
    reference = taub.limit_estimate
    return SweepReport(rows=tuple(rows), limit=limit, integral=integral, tauberian=taub,
                       discrepancy=abs(limit - reference) if good else math.nan,
                       excluded=excluded)


def circle_pair(vhat, cutoff):
    """``H = |D|`` and multiplication by ``V`` on the truncated circle.

    ``vhat`` maps integer frequencies to Fourier coefficients of ``V``.
    """
    from .models import TorusSymbolModel, abs_derivative_matrix, multiplication_matrix

    model = TorusSymbolModel(n=1, m=1.0, fhat=dict(vhat), cutoff=cutoff)
    if not model.is_real:
        raise InvalidInputError("V must be real-valued")
    return FormPair(abs_derivative_matrix(1, cutoff), HermitianOperator(multiplication_matrix(model)))
