"""Eigenvalue and singular-value sequences and their log-mean diagnostics.

A :class:`SpectralSequence` is the finite truncation of an eigenvalue
sequence: values ordered by nonincreasing modulus, repeated according to
multiplicity.  All quantities here (partial sums, log-means, weak
quasi-norms) work on the truncation only, so suprema over ``N`` or ``j``
become maxima over the available range.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InsufficientDataError, InvalidInputError

__all__ = [
    "Kind",
    "SpectralSequence",
    "MeasurabilityReport",
    "sort_sequence",
    "partial_sums",
    "log_mean_series",
    "weak_quasi_norm",
    "dixmier_macaev_norm",
    "split_signed",
    "tauberian_limit",
    "strong_tauberian_remainder",
    "read_spectrum_csv",
    "write_spectrum_csv",
]

DEFAULT_WINDOW_FRACTION = 0.5
DEFAULT_TOL = 1e-2
MIN_TAUBERIAN_LENGTH = 16


class Kind(str, enum.Enum):
    EIGENVALUES = "eigenvalues"
    SINGULAR_VALUES = "singular_values"
    SIGNED_POSITIVE = "signed_positive"
    SIGNED_NEGATIVE = "signed_negative"


_NONNEGATIVE_KINDS = (Kind.SINGULAR_VALUES, Kind.SIGNED_POSITIVE, Kind.SIGNED_NEGATIVE)


def _ordering(values):
    # nonincreasing modulus, then real part, then imaginary part
    values = np.asarray(values)
    return np.lexsort((-values.imag, -values.real, -np.abs(values)))


def _as_values(raw):
    values = np.asarray(raw)
    if values.ndim != 1:
        values = values.reshape(-1)
    if np.iscomplexobj(values):
        values = values.astype(complex)
        if values.size and not np.any(values.imag):
            values = values.real.copy()
    else:
        values = values.astype(float)
    return values


@dataclass(frozen=True)
class SpectralSequence:
    """Truncated eigenvalue / singular value sequence.

    ``values`` is a 1-d array (float when every entry is real, complex
    otherwise) whose moduli are nonincreasing.  Use :func:`sort_sequence`
    to build one from unordered data.
    """

    values: np.ndarray
    kind: Kind = Kind.EIGENVALUES

    def __post_init__(self):
        values = _as_values(self.values)
        kind = Kind(self.kind)
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("sequence contains non-finite values")
        mod = np.abs(values)
        if np.any(np.diff(mod) > 0):
            raise InvalidInputError("moduli must be nonincreasing; use sort_sequence")
        if kind in _NONNEGATIVE_KINDS:
            if np.iscomplexobj(values) or np.any(values < 0):
                raise InvalidInputError(f"{kind.value} sequences must be real and >= 0")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "kind", kind)

    def __len__(self):
        return self.values.size

    @property
    def is_real(self):
        return not np.iscomplexobj(self.values)

    def scaled(self, factor):
        """Return the sequence multiplied by a scalar, re-sorted."""
        kind = self.kind
        if kind in _NONNEGATIVE_KINDS and not (np.isreal(factor) and np.real(factor) >= 0):
            kind = Kind.EIGENVALUES
        return sort_sequence(self.values * factor, kind=kind)


@dataclass(frozen=True)
class MeasurabilityReport:
    """Outcome of a finite Tauberian test.

    ``window`` is the inclusive range ``(N_first, N_last)`` of log-mean
    indices inspected; ``length`` the truncation length.
    """

    limit_estimate: complex | float
    converged: bool
    window: tuple[int, int]
    dispersion: float
    surrogate_spread: float
    tol: float
    length: int
    remainder_bound: float | None = None
    notes: tuple[str, ...] = field(default=())


def sort_sequence(raw, kind=Kind.EIGENVALUES):
    """Order values by nonincreasing modulus.

    Ties are broken by nonincreasing real part, then nonincreasing
    imaginary part, so the output is deterministic.

    >>> sort_sequence([0.5, -1, 0.25]).values
    array([-1.  ,  0.5 ,  0.25])
    """
    values = _as_values(raw)
    return SpectralSequence(values[_ordering(values)], kind)


def partial_sums(seq):
    """``S[N-1] = sum_{j<N} values[j]`` for ``N = 1..len``."""
    return np.cumsum(seq.values)


def log_mean_series(seq):
    """Return ``sigma_N = (log N)^{-1} sum_{j<N} values[j]`` for ``N = 1..len``.

    ``sigma_1`` is 0 (the convention ``(log 1)^{-1} = 0``).
    """
    if len(seq) == 0:
        raise InsufficientDataError("log-mean of an empty sequence")
    sums = partial_sums(seq)
    out = np.zeros_like(sums)
    if sums.size > 1:
        out[1:] = sums[1:] / np.log(np.arange(2, sums.size + 1))
    return out


def _nonnegative(seq, what):
    values = seq.values
    if np.iscomplexobj(values):
        raise InvalidInputError(f"{what} needs real nonnegative values")
    if np.any(values < 0):
        raise InvalidInputError(f"{what} needs nonnegative values")
    return values


def weak_quasi_norm(seq, p):
    """``max_j (j+1)^{1/p} values[j]`` over the truncation (weak L_{p,inf} quasi-norm)."""
    if p <= 0:
        raise InvalidInputError("p must be positive")
    values = _nonnegative(seq, "weak_quasi_norm")
    if values.size == 0:
        return 0.0
    j = np.arange(1, values.size + 1, dtype=float)
    return float(np.max(j ** (1.0 / p) * values))


def dixmier_macaev_norm(seq):
    """``max_{N>=1} (log(N+1))^{-1} sum_{j<N} values[j]``."""
    values = _nonnegative(seq, "dixmier_macaev_norm")
    if values.size == 0:
        return 0.0
    sums = np.cumsum(values)
    return float(np.max(sums / np.log(np.arange(2, values.size + 2))))


def split_signed(seq):
    """Split a real sequence into positive and negative parts.

    Returns ``(plus, minus)`` where ``plus`` holds the positive values and
    ``minus`` the magnitudes of the negative ones, both nonincreasing.
    Zeros go to neither.
    """
    values = seq.values
    if np.iscomplexobj(values):
        raise InvalidInputError("split_signed needs real values")
    plus = np.sort(values[values > 0])[::-1]
    minus = np.sort(-values[values < 0])[::-1]
    return (SpectralSequence(plus, Kind.SIGNED_POSITIVE),
            SpectralSequence(minus, Kind.SIGNED_NEGATIVE))


def _window_bounds(length, window_fraction):
    if not 0 < window_fraction <= 1:
        raise InvalidInputError("window_fraction must lie in (0, 1]")
    size = max(1, int(math.ceil(window_fraction * length)))
    return length - size + 1, length


def tauberian_limit(seq, window_fraction=DEFAULT_WINDOW_FRACTION, tol=DEFAULT_TOL,
                    reference=None, family=None):
    """Estimate ``lim (log N)^{-1} sum_{j<N} lambda_j`` from a truncation.

    The log-means over the trailing ``window_fraction`` of indices are
    averaged; ``dispersion`` is their maximal deviation from that average
    and the sequence is declared converged when it does not exceed
    ``tol``.  The surrogate spread of the whole log-mean series is
    recorded as well (see :mod:`ncspec.limits`).  When ``reference`` is
    given, the strongly-Tauberian remainder against it is reported too.
    """
    from .limits import surrogate_spread

    n = len(seq)
    if n < MIN_TAUBERIAN_LENGTH:
        raise InsufficientDataError(
            f"need at least {MIN_TAUBERIAN_LENGTH} values, got {n}")
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    sigma = log_mean_series(seq)
    first, last = _window_bounds(n, window_fraction)
    window = sigma[first - 1:last]
    estimate = window.mean()
    dispersion = float(np.max(np.abs(window - estimate)))
    if not np.iscomplexobj(estimate):
        estimate = float(estimate)
    spread = surrogate_spread(sigma, family)
    remainder = None
    if reference is not None:
        remainder = strong_tauberian_remainder(seq, reference)
    return MeasurabilityReport(
        limit_estimate=estimate,
        converged=dispersion <= tol,
        window=(first, last),
        dispersion=dispersion,
        surrogate_spread=spread,
        tol=tol,
        length=n,
        remainder_bound=remainder,
    )


def strong_tauberian_remainder(seq, L):
    """``max_{N>=2} |sum_{j<N} values[j] - L log N|`` over the truncation.

    A bounded value across growing truncations is the finite witness of
    ``sum_{j<N} lambda_j = L log N + O(1)``; the caller compares sizes.
    """
    if len(seq) == 0:
        raise InsufficientDataError("remainder of an empty sequence")
    if len(seq) < 2:
        return 0.0
    sums = partial_sums(seq)[1:]
    logs = np.log(np.arange(2, len(seq) + 1))
    return float(np.max(np.abs(sums - L * logs)))


def write_spectrum_csv(seq_or_values, path):
    """Write ``index,re,im`` rows with 17 significant digits."""
    values = seq_or_values.values if isinstance(seq_or_values, SpectralSequence) else _as_values(seq_or_values)
    values = np.asarray(values, dtype=complex)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "re", "im"])
        for i, z in enumerate(values):
            writer.writerow([i, f"{z.real:.17g}", f"{z.imag:.17g}"])


def read_spectrum_csv(path, kind=Kind.EIGENVALUES):
    """Read an ``index,re,im`` file; rows may come in any order."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["index", "re", "im"]:
            raise InvalidInputError(f"{path}: expected header 'index,re,im'")
        rows = [row for row in reader if row]
    try:
        re = np.array([float(r[1]) for r in rows])
        im = np.array([float(r[2]) for r in rows])
    except (IndexError, ValueError) as exc:
        raise InvalidInputError(f"{path}: malformed row ({exc})") from exc
    return sort_sequence(re + 1j * im if np.any(im) else re, kind=kind)
