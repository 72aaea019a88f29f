"""Finite surrogates for extended limits.

Extended limits are not computable, but ordinary summation methods
(Cesaro, Hölder, logarithmic means, dilated subsequences) are positive
normalized linear functionals that agree with ``lim`` on convergent
sequences.  Evaluating several of them on the same finite sequence and
measuring how far apart they land gives a cheap convergence probe.

Each surrogate returns the *last* entry of its transformed sequence.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import InsufficientDataError, InvalidInputError

__all__ = [
    "SurrogateFamily",
    "DEFAULT_FAMILY",
    "cesaro_mean",
    "classical_cesaro_mean",
    "logarithmic_mean",
    "dilation_value",
    "evaluate",
    "surrogate_spread",
]

KINDS = ("cesaro", "iterated_cesaro", "dilation", "log_mean")


def _seq(a):
    a = np.asarray(a)
    if a.ndim != 1:
        a = a.reshape(-1)
    if a.size == 0:
        raise InsufficientDataError("empty sequence")
    return a


def _running_mean(a):
    return np.cumsum(a) / np.arange(1, a.size + 1)


def cesaro_mean(a, order=1):
    """Apply the Cesaro averaging operator ``order`` times; return the last entry.

    This is the Hölder mean H_order; for ``order = 1`` it is the ordinary
    arithmetic mean of the whole sequence.
    """
    a = _seq(a)
    if int(order) != order or order < 1:
        raise InvalidInputError("order must be a positive integer")
    for _ in range(int(order)):
        a = _running_mean(a)
    return a[-1]


def classical_cesaro_mean(a, order=1):
    """Classical (C, k) mean of ``a`` at its full length.

    Weights are ``binom(N - n + k - 1, k - 1) / binom(N + k - 1, k)`` for
    the ``n``-th of ``N`` entries (1-based).
    """
    a = _seq(a)
    k = int(order)
    if k != order or k < 1:
        raise InvalidInputError("order must be a positive integer")
    n_total = a.size
    n = np.arange(1, n_total + 1)
    # log binom(N - n + k - 1, k - 1) - log binom(N + k - 1, k)
    m = n_total - n
    logw = (gammaln(m + k) - gammaln(k) - gammaln(m + 1)
            - (gammaln(n_total + k) - gammaln(k + 1) - gammaln(n_total)))
    w = np.exp(logw)
    return np.dot(w / w.sum(), a)


def logarithmic_mean(a, iterations=1):
    """Logarithmic (Riesz) mean ``(1/H_N) sum_n a_n / n``, iterated."""
    a = _seq(a)
    if int(iterations) != iterations or iterations < 1:
        raise InvalidInputError("iterations must be a positive integer")
    weights = 1.0 / np.arange(1, a.size + 1)
    norm = np.cumsum(weights)
    for _ in range(int(iterations)):
        a = np.cumsum(weights * a) / norm
    return a[-1]


def dilation_value(a, factor):
    """Cesaro mean of the dilated subsequence ``a_{m k}``, ``k >= 1`` (1-based)."""
    a = np.asarray(a).reshape(-1)
    m = int(factor)
    if m != factor or m < 2:
        raise InvalidInputError("dilation factor must be an integer >= 2")
    if a.size < m:
        raise InsufficientDataError(f"length {a.size} shorter than factor {m}")
    return a[m - 1::m].mean()


@dataclass(frozen=True)
class SurrogateFamily:
    """A list of ``(kind, parameter)`` averaging procedures.

    Kinds: ``cesaro`` (classical (C, k)), ``iterated_cesaro`` (Hölder,
    i.e. :func:`cesaro_mean`), ``dilation`` and ``log_mean``.
    """

    members: tuple[tuple[str, int], ...]

    def __post_init__(self):
        members = tuple((str(k), int(p)) for k, p in self.members)
        if not members:
            raise InvalidInputError("surrogate family must be nonempty")
        for kind, param in members:
            if kind not in KINDS:
                raise InvalidInputError(f"unknown surrogate kind {kind!r}")
            if param < 1 or (kind == "dilation" and param < 2):
                raise InvalidInputError(f"bad parameter {param} for {kind}")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_config(cls, items):
        """Build from ``[{"kind": ..., "parameter": ...}, ...]`` or pairs."""
        members = []
        for item in items:
            if isinstance(item, dict):
                extra = set(item) - {"kind", "parameter"}
                if extra:
                    raise InvalidInputError(f"unknown surrogate keys {sorted(extra)}")
                members.append((item["kind"], item["parameter"]))
            else:
                members.append(tuple(item))
        return cls(tuple(members))


DEFAULT_FAMILY = SurrogateFamily((("cesaro", 1), ("cesaro", 2), ("dilation", 2), ("dilation", 3)))


def evaluate(a, kind, parameter):
    """Value of one family member on ``a``; constants map to themselves exactly."""
    a = _seq(a)
    if kind not in KINDS:
        raise InvalidInputError(f"unknown surrogate kind {kind!r}")
    if kind == "dilation" and a.size < parameter:
        return dilation_value(a, parameter)
    if np.all(a == a[0]):
        return a[0]
    if kind == "cesaro":
        return classical_cesaro_mean(a, parameter)
    if kind == "iterated_cesaro":
        return cesaro_mean(a, parameter)
    if kind == "dilation":
        return dilation_value(a, parameter)
    if kind == "log_mean":
        return logarithmic_mean(a, parameter)
    raise InvalidInputError(f"unknown surrogate kind {kind!r}")


def surrogate_spread(a, family=None):
    """Largest pairwise distance between the family's values on ``a``."""
    family = DEFAULT_FAMILY if family is None else family
    a = _seq(a)
    values = np.array([evaluate(a, kind, p) for kind, p in family.members])
    return float(np.max(np.abs(values[:, None] - values[None, :])))
