"""Model operators with known continuum answers.

Diagonal models are given by explicit eigenvalue rules.  Torus models
realize ``f |D|^{-m}`` and ``|D|^{-m/2} f |D|^{-m/2}`` on the flat torus
``T^n = (R / 2 pi Z)^n`` in the Fourier basis ``e^{i k.x}``, truncated to
frequencies ``|k|_inf <= K``.  ``|D| = Delta^{1/2}`` has eigenvalue ``|k|``
(Euclidean) and its inverse powers are partial inverses (0 on ``k = 0``).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, UnsupportedOrderError
from .matops import GeneralOperator, HermitianOperator
from .spectra import Kind, SpectralSequence, sort_sequence

__all__ = [
    "DiagonalModel",
    "TorusSymbolModel",
    "diagonal_sequence",
    "build_diagonal",
    "free_torus_sequence",
    "frequencies",
    "torus_matrix",
    "multiplication_matrix",
    "abs_derivative_matrix",
    "nc_residue_quadrature",
    "predicted_connes_integral",
    "symbol_weyl_rhs",
    "sphere_area",
    "load_model_json",
    "save_model_json",
]

DIAGONAL_RULES = ("harmonic", "power", "log_oscillating", "custom")
MAX_DENSE_DIM = 20000
SPHERE_POINTS_2D = 360


@dataclass(frozen=True)
class DiagonalModel:
    """An explicit eigenvalue rule.

    ``harmonic``: ``(j+1)^{-1}``; ``power``: ``(j+1)^{-alpha}``;
    ``log_oscillating``: ``(j+1)^{-1} (1 + sin(log log(j+2)))``, whose
    log-means oscillate and never converge; ``custom``: ``values`` verbatim.
    """

    rule: str
    length: int = 0
    alpha: float = 1.0
    values: tuple = ()

    def __post_init__(self):
        if self.rule not in DIAGONAL_RULES:
            raise InvalidInputError(f"unknown diagonal rule {self.rule!r}")
        if self.rule == "custom":
            object.__setattr__(self, "values", tuple(self.values))
            object.__setattr__(self, "length", len(self.values))
        if self.length < 1:
            raise InvalidInputError("diagonal model needs length >= 1")
        if self.rule == "power" and not self.alpha > 0:
            raise InvalidInputError("power rule needs alpha > 0")

    def raw_values(self):
        j = np.arange(self.length, dtype=float)
        if self.rule == "harmonic":
            return 1.0 / (j + 1.0)
        if self.rule == "power":
            return (j + 1.0) ** (-self.alpha)
        if self.rule == "log_oscillating":
            return (1.0 + np.sin(np.log(np.log(j + 2.0)))) / (j + 1.0)
        return np.asarray(self.values)


def diagonal_sequence(model):
    """Eigenvalue sequence of a diagonal model, without forming a matrix."""
    return sort_sequence(model.raw_values())


def build_diagonal(model):
    """Diagonal matrix carrying the model's values in rule order."""
    if model.length > MAX_DENSE_DIM:
        raise InvalidInputError(
            f"dense diagonal of size {model.length} refused; use diagonal_sequence",
            guard="max-dim")
    values = np.asarray(model.raw_values())
    if np.iscomplexobj(values) and np.any(values.imag):
        return GeneralOperator(np.diag(values))
    return HermitianOperator(np.diag(np.real(values)))


def free_torus_sequence(n, m, cutoff):
    """Closed-form spectrum of ``|D|^{-m}`` truncated to ``0 < |k|_inf <= cutoff``."""
    k = np.arange(-cutoff, cutoff + 1)
    if n == 1:
        norms = np.abs(k).astype(float)
    elif n == 2:
        k1, k2 = np.meshgrid(k, k, indexing="ij")
        norms = np.hypot(k1, k2).reshape(-1)
    else:
        raise InvalidInputError("only n = 1, 2 are supported")
    norms = norms[norms > 0]
    return SpectralSequence(np.sort(norms ** (-float(m)))[::-1], Kind.EIGENVALUES)


def sphere_area(n):
    """``|S^{n-1}|``: 2 for ``n = 1``, ``2 pi`` for ``n = 2``."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


@dataclass(frozen=True)
class TorusSymbolModel:
    """``f`` given by finitely many Fourier coefficients, operator order ``-m``.

    ``fhat`` maps frequency tuples to coefficients of ``f(x) = sum fhat(k)
    e^{i k.x}``.  ``symmetrized`` selects ``|D|^{-m/2} f |D|^{-m/2}``
    instead of ``f |D|^{-m}``.
    """

    n: int
    m: float
    fhat: dict = field(default_factory=dict)
    cutoff: int = 64
    symmetrized: bool = True

    def __post_init__(self):
        if self.n not in (1, 2):
            raise InvalidInputError("torus dimension must be 1 or 2")
        if not self.m > 0:
            raise InvalidInputError("order m must be positive")
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise InvalidInputError("cutoff must be a positive integer")
        coeffs = {}
        for k, c in dict(self.fhat).items():
            key = (int(k),) if np.isscalar(k) else tuple(int(x) for x in k)
            if len(key) != self.n:
                raise InvalidInputError(f"frequency {k!r} has wrong dimension")
            if c != 0:
                coeffs[key] = coeffs.get(key, 0) + complex(c)
        object.__setattr__(self, "fhat", coeffs)
        object.__setattr__(self, "cutoff", int(self.cutoff))
        if 2 * self.support_radius > self.cutoff:
            raise InvalidInputError("fhat support exceeds cutoff / 2")

    @classmethod
    def trigonometric(cls, coefficients, n=1, m=None, cutoff=64, symmetrized=True):
        """Convenience constructor; ``m`` defaults to ``n`` (Connes' order ``-n``)."""
        return cls(n=n, m=float(n if m is None else m), fhat=dict(coefficients),
                   cutoff=cutoff, symmetrized=symmetrized)

    def with_cutoff(self, cutoff):
        return TorusSymbolModel(self.n, self.m, dict(self.fhat), cutoff, self.symmetrized)

    @property
    def support_radius(self):
        return max((max(abs(x) for x in k) for k in self.fhat), default=0)

    @property
    def is_real(self):
        """``f`` real-valued, i.e. ``fhat(-k) = conj(fhat(k))``."""
        for k, c in self.fhat.items():
            mirror = self.fhat.get(tuple(-x for x in k), 0)
            if abs(mirror - np.conj(c)) > 1e-14 * max(1.0, abs(c)):
                return False
        return True

    @property
    def dim(self):
        return (2 * self.cutoff + 1) ** self.n

    def mean_value(self):
        """``fhat(0)``, the average of ``f`` over the torus."""
        return self.fhat.get((0,) * self.n, 0)

    def evaluate(self, points):
        """``f`` at points of shape ``(..., n)``."""
        x = np.asarray(points, dtype=float)
        out = np.zeros(x.shape[:-1], dtype=complex)
        for k, c in self.fhat.items():
            out += c * np.exp(1j * (x @ np.asarray(k, dtype=float)))
        return out.real if self.is_real else out

    def grid(self, points_per_dim=None):
        """Uniform periodic grid with ``4 K`` points per direction by default."""
        q = points_per_dim or 4 * self.cutoff
        t = 2 * np.pi * np.arange(q) / q
        mesh = np.meshgrid(*([t] * self.n), indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.n)

    def sup_norm(self):
        """``max |f|`` on the quadrature grid."""
        if not self.fhat:
            return 0.0
        return float(np.max(np.abs(self.evaluate(self.grid(max(4 * self.cutoff, 256))))))

    def resolution_floor(self):
        """Eigenvalue magnitude below which the truncation is unreliable.

        ``max|f| K^{-m}``: the symbol ``f(x) |xi|^{-m}`` is only fully
        represented for ``|xi| <= K``, so eigenvalues below this level
        belong to the cutoff rather than to the continuum operator.
        """
        return self.sup_norm() * float(self.cutoff) ** (-self.m)


def frequencies(n, cutoff):
    """Frequency vectors ``|k|_inf <= cutoff`` in row-major order, shape ``(dim, n)``."""
    k = np.arange(-cutoff, cutoff + 1)
    if n == 1:
        return k[:, None]
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    return np.stack([k1.reshape(-1), k2.reshape(-1)], axis=1)


def multiplication_matrix(model):
    """Matrix of multiplication by ``f``: ``C[k, k'] = fhat(k - k')``."""
    n, K = model.n, model.cutoff
    side = 2 * K + 1
    dtype = float if all(np.imag(c) == 0 for c in model.fhat.values()) else complex
    c = np.zeros((side ** n, side ** n), dtype=dtype)
    if n == 1:
        for (d,), val in model.fhat.items():
            idx = np.arange(max(0, -d), min(side, side - d))
            c[idx + d, idx] = val if dtype is complex else val.real
        return c
    freq = frequencies(2, K)
    for (d1, d2), val in model.fhat.items():
        src = np.flatnonzero((np.abs(freq[:, 0] + d1) <= K) & (np.abs(freq[:, 1] + d2) <= K))
        tgt = src + d1 * side + d2
        c[tgt, src] = val if dtype is complex else val.real
    return c


def _abs_freq(model):
    return np.linalg.norm(frequencies(model.n, model.cutoff).astype(float), axis=1)


def _inverse_power(norms, power):
    out = np.zeros_like(norms)
    nz = norms > 0
    out[nz] = norms[nz] ** (-power)
    return out


def torus_matrix(model):
    """Fourier-truncated matrix of the model operator.

    Symmetrized: ``M[k, k'] = w(k) fhat(k - k') w(k')`` with ``w(k) =
    |k|^{-m/2}``, ``w(0) = 0``.  One-sided: ``M[k, k'] = fhat(k - k')
    |k'|^{-m} [k' != 0]``.  Returns a :class:`HermitianOperator` for the
    symmetrized form with real ``f``, a :class:`GeneralOperator` otherwise.
    """
    if model.support_radius and model.cutoff < 4 * model.support_radius:
        raise InvalidInputError(
            f"cutoff {model.cutoff} < 4 x support radius {model.support_radius} (aliasing guard)",
            guard="aliasing")
    c = multiplication_matrix(model)
    norms = _abs_freq(model)
    if model.symmetrized:
        w = _inverse_power(norms, model.m / 2.0)
        c *= w[:, None]
        c *= w[None, :]
        if model.is_real:
            return HermitianOperator(c)
        return GeneralOperator(c)
    c *= _inverse_power(norms, model.m)[None, :]
    return GeneralOperator(c)


def abs_derivative_matrix(n, cutoff, power=1.0):
    """Diagonal matrix of ``|D|^power`` (eigenvalue ``|k|^power``) on the truncation."""
    norms = np.linalg.norm(frequencies(n, cutoff).astype(float), axis=1)
    return HermitianOperator(np.diag(norms ** power))


def _sphere_rule(n):
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    theta = 2 * np.pi * np.arange(SPHERE_POINTS_2D) / SPHERE_POINTS_2D
    pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return pts, np.full(SPHERE_POINTS_2D, 2 * np.pi / SPHERE_POINTS_2D)


def _cosphere_integral(model, integrand, points_per_dim=None):
    """``int_{T^n x S^{n-1}} integrand(f(x) |xi|^{-m}) dx dxi`` by product quadrature."""
    x = model.grid(points_per_dim)
    fx = model.evaluate(x) if model.fhat else np.zeros(len(x))
    xi, wxi = _sphere_rule(model.n)
    wx = (2 * np.pi) ** model.n / len(x)
    norms = np.linalg.norm(xi, axis=1) ** (-model.m)
    # principal symbol sigma(x, xi) = f(x) |xi|^{-m}, evaluated on |xi| = 1
    sigma = fx[:, None] * norms[None, :]
    return wx * np.sum(integrand(sigma) * wxi[None, :])


def nc_residue_quadrature(model, points_per_dim=None):
    """Noncommutative residue ``(2 pi)^{-n} int_{S*T^n} sigma(P)(x, xi) dx dxi``.

    Only order ``-n`` operators are handled.
    """
    if not math.isclose(model.m, model.n):
        raise UnsupportedOrderError(f"residue implemented for order -n only (m={model.m}, n={model.n})")
    val = _cosphere_integral(model, lambda s: s, points_per_dim) / (2 * np.pi) ** model.n
    return float(val.real) if model.is_real else complex(val)


def predicted_connes_integral(model):
    """``c_n int_{T^n} f dx`` with ``c_n = (1/n) (2 pi)^{-n} |S^{n-1}|``.

    On the flat torus this is ``|S^{n-1}| fhat(0) / n``.
    """
    if not math.isclose(model.m, model.n):
        raise UnsupportedOrderError(f"integration formula needs order -n (m={model.m}, n={model.n})")
    if not model.is_real:
        raise InvalidInputError("predicted_connes_integral needs a real-valued f")
    c_n = sphere_area(model.n) / (model.n * (2 * np.pi) ** model.n)
    return float(c_n * (2 * np.pi) ** model.n * np.real(model.mean_value()))


def symbol_weyl_rhs(model, p, mode="abs", points_per_dim=None):
    """``[(1/n)(2 pi)^{-n} int_{S*T^n} g(sigma) dx dxi]^{1/p}``.

    ``g`` is ``|sigma|^p`` (``mode="abs"``), ``sigma_+^p`` or ``sigma_-^p``;
    ``p`` must equal ``n / m``.
    """
    if not math.isclose(p, model.n / model.m, rel_tol=1e-12):
        raise InvalidInputError(f"p={p} inconsistent with n/m={model.n / model.m}")
    if mode not in ("abs", "plus", "minus"):
        raise InvalidInputError(f"unknown mode {mode!r}")
    if mode != "abs" and not model.is_real:
        raise InvalidInputError("signed modes need a real-valued f")
    funcs = {
        "abs": lambda s: np.abs(s) ** p,
        "plus": lambda s: np.clip(np.real(s), 0.0, None) ** p,
        "minus": lambda s: np.clip(-np.real(s), 0.0, None) ** p,
    }
    # kinks of sigma_{+-} make the trapezoid rule only second order; refine
    q = points_per_dim or max(4 * model.cutoff, 8192 if model.n == 1 else 256)
    val = _cosphere_integral(model, funcs[mode], q)
    val = float(np.real(val)) / (model.n * (2 * np.pi) ** model.n)
    return val ** (1.0 / p)


def model_to_dict(model):
    return {
        "n": model.n,
        "m": model.m,
        "cutoff": model.cutoff,
        "symmetrized": model.symmetrized,
        "fhat": [{"k": list(k), "re": float(np.real(c)), "im": float(np.imag(c))}
                 for k, c in sorted(model.fhat.items())],
    }


def model_from_dict(doc):
    allowed = {"n", "m", "cutoff", "symmetrized", "fhat"}
    extra = set(doc) - allowed
    if extra:
        raise InvalidInputError(f"unknown model keys: {sorted(extra)}")
    missing = {"n", "m", "cutoff", "fhat"} - set(doc)
    if missing:
        raise InvalidInputError(f"missing model keys: {sorted(missing)}")
    fhat = {}
    for item in doc["fhat"]:
        bad = set(item) - {"k", "re", "im"}
        if bad:
            raise InvalidInputError(f"unknown fhat keys: {sorted(bad)}")
        fhat[tuple(int(x) for x in item["k"])] = complex(item.get("re", 0.0), item.get("im", 0.0))
    return TorusSymbolModel(n=int(doc["n"]), m=float(doc["m"]), fhat=fhat,
                            cutoff=int(doc["cutoff"]), symmetrized=bool(doc.get("symmetrized", True)))


def save_model_json(model, path):
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2), encoding="utf-8")


def load_model_json(path):
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
