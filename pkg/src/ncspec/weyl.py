"""Weyl coefficients ``Lambda = lim j^{1/p} lambda_j`` from finite spectra.

Truncated model spectra are only trustworthy above a resolution floor
(see :meth:`ncspec.models.TorusSymbolModel.resolution_floor`).  Entries at
or below ``floor`` are discarded, and the tail window is the last quarter
of what remains with its final 5% cut off.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, InvalidInputError
from .matops import HermitianOperator, hermitian_eig, singular_values, sqrt_psd, eigh
from .spectra import (Kind, MeasurabilityReport, SpectralSequence, split_signed,
                      tauberian_limit, weak_quasi_norm)

__all__ = [
    "WeylEstimate",
    "PerturbationReport",
    "IntegralReport",
    "resolved",
    "weyl_coefficient",
    "weyl_pm",
    "counting_limit",
    "perturbation_check",
    "bks_ratio",
    "weyl_to_integral",
]

MIN_WEYL_LENGTH = 32
WINDOW_FRACTION = 0.25
EDGE_FRACTION = 0.05
GRID_POINTS = 64


@dataclass(frozen=True)
class WeylEstimate:
    """A Weyl coefficient estimate; ``window`` is ``(j_first, j_last)`` inclusive."""

    p: float
    value: float
    window: tuple[int, int]
    dispersion: float
    method: str
    resolved_length: int
    flag: str | None = None

    def __post_init__(self):
        if self.value < 0 or self.dispersion < 0:
            raise InvalidInputError("Weyl estimates are nonnegative")


def _magnitudes(seq):
    values = seq.values
    if np.iscomplexobj(values) or np.any(values < 0):
        raise InvalidInputError("Weyl estimators need nonnegative real values")
    return values


def resolved(seq, floor=0.0):
    """The leading entries of a nonnegative sequence that lie strictly above ``floor``."""
    values = _magnitudes(seq)
    count = int(np.count_nonzero(values > floor))
    return values[:count]


def _window(length, window_fraction, edge_fraction):
    if not 0 < window_fraction <= 1 or not 0 <= edge_fraction < window_fraction:
        raise InvalidInputError("need 0 <= edge_fraction < window_fraction <= 1")
    lo = int(math.floor((1.0 - window_fraction) * length))
    hi = int(math.ceil((1.0 - edge_fraction) * length)) - 1
    return lo, max(lo, min(hi, length - 1))


def weyl_coefficient(seq, p=1.0, window_fraction=WINDOW_FRACTION, edge_fraction=EDGE_FRACTION,
                     floor=0.0):
    """Tail mean of ``j^{1/p} values[j]`` over the resolved range."""
    if p <= 0:
        raise InvalidInputError("p must be positive")
    values = resolved(seq, floor)
    if values.size < MIN_WEYL_LENGTH:
        raise InsufficientDataError(
            f"need {MIN_WEYL_LENGTH} resolved values, got {values.size}")
    lo, hi = _window(values.size, window_fraction, edge_fraction)
    j = np.arange(lo, hi + 1, dtype=float)
    tail = j ** (1.0 / p) * values[lo:hi + 1]
    value = float(tail.mean())
    return WeylEstimate(p=p, value=value, window=(lo, hi),
                        dispersion=float(np.max(np.abs(tail - value))),
                        method="tail_mean", resolved_length=int(values.size))


def _part_estimate(part, p, floor, estimator, method, **kw):
    count = int(np.count_nonzero(part.values > floor))
    if count == 0:
        return WeylEstimate(p, 0.0, (0, -1), 0.0, method, 0, "empty-part")
    if count < MIN_WEYL_LENGTH:
        # finitely many entries; their j^{1/p} lambda_j tail is 0
        return WeylEstimate(p, 0.0, (0, count - 1), 0.0, method, count, "short-part")
    return estimator(part, p, floor=floor, **kw)


def weyl_pm(seq, p=1.0, floor=0.0, **kw):
    """``(Lambda^+, Lambda^-)`` of a real eigenvalue sequence.

    A part with no resolved entries yields 0 with ``flag="empty-part"``;
    fewer than 32 entries give 0 with ``flag="short-part"``.
    """
    plus, minus = split_signed(seq)
    return (_part_estimate(plus, p, floor, weyl_coefficient, "tail_mean", **kw),
            _part_estimate(minus, p, floor, weyl_coefficient, "tail_mean", **kw))


def counting_limit(seq, p=1.0, lam_grid=None, floor=0.0,
                   window_fraction=WINDOW_FRACTION, edge_fraction=EDGE_FRACTION):
    """``(lim lam^p N(lam))^{1/p}`` from a decreasing grid of thresholds.

    The default grid is geometric between the values bounding the tail
    window used by :func:`weyl_coefficient`.  Thresholds must lie above
    ``floor`` and above the smallest resolved value, where ``N(lam)`` is
    still complete.
    """
    if p <= 0:
        raise InvalidInputError("p must be positive")
    values = resolved(seq, floor)
    if values.size < MIN_WEYL_LENGTH:
        raise InsufficientDataError(
            f"need {MIN_WEYL_LENGTH} resolved values, got {values.size}")
    if lam_grid is None:
        lo, hi = _window(values.size, window_fraction, edge_fraction)
        lam = np.geomspace(values[lo], values[hi], GRID_POINTS)
    else:
        lam = np.sort(np.asarray(lam_grid, dtype=float))[::-1]
    if np.any(lam <= max(floor, values[-1])):
        raise InvalidInputError("grid outside resolved range")
    ascending = values[::-1]
    counts = values.size - np.searchsorted(ascending, lam, side="right")
    samples = (lam ** p * counts) ** (1.0 / p)
    value = float(np.mean(lam ** p * counts) ** (1.0 / p))
    first = int(counts.min()) if counts.size else 0
    last = int(counts.max()) if counts.size else 0
    return WeylEstimate(p=p, value=value, window=(first, last),
                        dispersion=float(np.max(np.abs(samples - value))),
                        method="counting", resolved_length=int(values.size))


def _spectrum(A):
    if isinstance(A, SpectralSequence):
        return A
    return hermitian_eig(A)


@dataclass(frozen=True)
class PerturbationReport:
    eps: tuple[float, ...]
    reference: tuple[float, float]
    primes: tuple[tuple[float, float], ...]
    tails: tuple[tuple[float, float], ...]
    deviations: tuple[float, ...]
    hypothesis_ok: tuple[bool, ...]
    monotone: bool

    @property
    def ok(self):
        return all(self.hypothesis_ok) and self.monotone


def _tail_sup(part, p, floor):
    values = part.values[part.values > floor]
    if values.size < MIN_WEYL_LENGTH:
        return 0.0
    lo, hi = _window(values.size, WINDOW_FRACTION, EDGE_FRACTION)
    j = np.arange(lo, hi + 1, dtype=float)
    return float(np.max(j ** (1.0 / p) * values[lo:hi + 1]))


def perturbation_check(A_eps_prime, A_eps_double, eps_list, p=1.0, floor=0.0,
                       tol=1e-9, hypothesis_slack=1e-2):
    """Empirical harness for the Birman-Solomyak perturbation statement.

    Every ``A = A'_eps + A''_eps`` must give the same ``A``.  For each
    ``eps`` the hypothesis ``tail sup j^{1/p} lambda_j^{+-}(A''_eps) <=
    eps`` is checked (with ``hypothesis_slack``), and the deviation
    ``max |Lambda^{+-}(A'_eps) - Lambda^{+-}(A)|`` is recorded; the
    conclusion holds empirically when the deviations do not grow as
    ``eps`` decreases.
    """
    primes = [op if isinstance(op, HermitianOperator) else HermitianOperator(op) for op in A_eps_prime]
    doubles = [op if isinstance(op, HermitianOperator) else HermitianOperator(op) for op in A_eps_double]
    eps = [float(e) for e in eps_list]
    if not (len(primes) == len(doubles) == len(eps)) or not eps:
        raise InvalidInputError("need matching nonempty lists of A', A'' and eps")
    total = primes[0].entries + doubles[0].entries
    scale = max(np.max(np.abs(total)), 1.0)
    for a1, a2 in zip(primes, doubles):
        if a1.dim != a2.dim or a1.dim != total.shape[0]:
            raise InvalidInputError("dimension mismatch in decomposition")
        if np.max(np.abs(a1.entries + a2.entries - total)) > tol * scale:
            raise InvalidInputError("decomposition inconsistent: A' + A'' differs between eps")
    order = np.argsort(eps)[::-1]
    ref_p, ref_m = weyl_pm(hermitian_eig(HermitianOperator(total)), p, floor=floor)
    out_primes, tails, devs, hyp = [], [], [], []
    for i in order:
        lp, lm = weyl_pm(hermitian_eig(primes[i]), p, floor=floor)
        dplus, dminus = split_signed(hermitian_eig(doubles[i]))
        tail = (_tail_sup(dplus, p, floor), _tail_sup(dminus, p, floor))
        out_primes.append((lp.value, lm.value))
        tails.append(tail)
        devs.append(max(abs(lp.value - ref_p.value), abs(lm.value - ref_m.value)))
        hyp.append(max(tail) <= eps[i] + hypothesis_slack)
    slack = max(ref_p.dispersion, ref_m.dispersion) + tol
    monotone = all(devs[k + 1] <= devs[k] + slack for k in range(len(devs) - 1))
    return PerturbationReport(eps=tuple(eps[i] for i in order),
                              reference=(ref_p.value, ref_m.value),
                              primes=tuple(out_primes), tails=tuple(tails),
                              deviations=tuple(devs), hypothesis_ok=tuple(hyp),
                              monotone=monotone)


def _psd(A, what, rtol=1e-12):
    A = A if isinstance(A, HermitianOperator) else HermitianOperator(A)
    w, _ = eigh(A, vectors=False)
    scale = max(np.max(np.abs(w)), np.finfo(float).tiny)
    if w[0] < -rtol * scale * max(1, A.dim):
        raise InvalidInputError(f"{what} is not positive semidefinite")
    return A


def bks_ratio(A, B, q=1.0):
    """``||sqrt A - sqrt B||_{2q,inf} / sqrt(||A - B||_{q,inf})``; 0 when ``A = B``."""
    if q <= 0:
        raise InvalidInputError("q must be positive")
    A = _psd(A, "A")
    B = _psd(B, "B")
    if A.dim != B.dim:
        raise InvalidInputError("dimension mismatch")
    diff = HermitianOperator(A.entries - B.entries)
    denom = weak_quasi_norm(singular_values(diff), q)
    if denom == 0:
        return 0.0
    root_diff = HermitianOperator(sqrt_psd(A).entries - sqrt_psd(B).entries)
    return weak_quasi_norm(singular_values(root_diff), 2 * q) / math.sqrt(denom)


@dataclass(frozen=True)
class IntegralReport:
    """``Lambda^+ - Lambda^-`` next to the independent log-mean estimate."""

    integral: float
    plus: WeylEstimate
    minus: WeylEstimate
    tauberian: MeasurabilityReport
    discrepancy: float
    weyl_ok: bool


def weyl_to_integral(A, floor=0.0, weyl_tol=0.05, window_fraction=0.5, tol=1e-2):
    """NC integral of a ``p = 1`` Weyl operator as ``Lambda^+ - Lambda^-``.

    The Tauberian log-mean of the full spectrum is computed alongside and
    the absolute discrepancy reported.  ``weyl_ok`` is False when either
    tail dispersion exceeds ``weyl_tol``; the values are reported anyway.
    """
    seq = _spectrum(A)
    if not seq.is_real:
        raise InvalidInputError("weyl_to_integral needs a self-adjoint operator")
    plus, minus = weyl_pm(seq, 1.0, floor=floor)
    integral = plus.value - minus.value
    taub = tauberian_limit(seq, window_fraction, tol)
    weyl_ok = plus.dispersion <= weyl_tol and minus.dispersion <= weyl_tol
    return IntegralReport(integral=integral, plus=plus, minus=minus, tauberian=taub,
                          discrepancy=abs(integral - taub.limit_estimate), weyl_ok=weyl_ok)
