"""Spectral computation of noncommutative integrals on finite truncations.

Submodules
----------
spectra
    Eigenvalue sequences, log-means, weak quasi-norms, Tauberian tests.
limits
    Summation-method surrogates for extended limits.
matops
    Hermitian and general operators, eigensolvers, spectral calculus.
models
    Diagonal and flat-torus model operators with known answers.
weyl
    Weyl coefficient estimators and perturbation harnesses.
semiclassical
    Birman-Schwinger counting and the semiclassical sweep.
"""
from .errors import (GuardViolation, InsufficientDataError, InvalidInputError, SpectralError,
                     UnsupportedOrderError)
from .spectra import (Kind, MeasurabilityReport, SpectralSequence, dixmier_macaev_norm,
                      log_mean_series, sort_sequence, split_signed, strong_tauberian_remainder,
                      tauberian_limit, weak_quasi_norm)
from .matops import GeneralOperator, HermitianOperator, Embedding, hermitian_eig, singular_values

__version__ = "0.1.0"

__all__ = [
    "GuardViolation",
    "InsufficientDataError",
    "InvalidInputError",
    "SpectralError",
    "UnsupportedOrderError",
    "Kind",
    "MeasurabilityReport",
    "SpectralSequence",
    "dixmier_macaev_norm",
    "log_mean_series",
    "sort_sequence",
    "split_signed",
    "strong_tauberian_remainder",
    "tauberian_limit",
    "weak_quasi_norm",
    "GeneralOperator",
    "HermitianOperator",
    "Embedding",
    "hermitian_eig",
    "singular_values",
]
