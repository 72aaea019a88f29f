"""
Log-means of diagonal spectra
=============================

The eigenvalues ``1/(j+1)`` have partial sums ``log N + gamma``, so their
log-means tend to 1.  Multiplying by ``1 + sin(log log j)`` leaves the
sequence weak trace class but makes the log-means wander forever.
"""

import numpy as np

from ncspec.models import DiagonalModel, diagonal_sequence
from ncspec.spectra import log_mean_series, tauberian_limit

# the harmonic sequence, one million terms
harmonic = diagonal_sequence(DiagonalModel("harmonic", 10 ** 6))
rep = tauberian_limit(harmonic)
print(f"harmonic: estimate {rep.limit_estimate:.4f}, converged={rep.converged}")

# sigma_N drifts like gamma / log N towards 1
sigma = log_mean_series(harmonic)
for N in (10, 10 ** 3, 10 ** 6):
    print(f"  sigma_{N} = {sigma[N - 1]:.4f}")

###############################################################################
# The oscillating model.  Its log-means follow ``1 + sin(log log N)`` up to
# slowly decaying terms, so over the whole range they move by order one.

osc = diagonal_sequence(DiagonalModel("log_oscillating", 10 ** 6))
sigma = log_mean_series(osc)
N = np.unique(np.geomspace(2, 10 ** 6, 12).astype(int))
print("log_oscillating:", " ".join(f"{s:.3f}" for s in sigma[N - 1]))

full = tauberian_limit(osc, window_fraction=1.0)
print(f"  whole range: dispersion {full.dispersion:.3f}, converged={full.converged}")

# the default window only sees the last half of the indices, where the
# drift is slow; the surrogate family then barely separates
late = tauberian_limit(osc)
print(f"  late window: dispersion {late.dispersion:.4f}, spread {late.surrogate_spread:.4f}")
