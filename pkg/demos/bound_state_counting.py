"""
Counting bound states
=====================

``h^2 |D| - V`` on the circle with ``V = 1 + cos x``: the number of
negative eigenvalues grows like ``(1/h^2) int K`` where ``K =
|D|^{-1/2} V |D|^{-1/2}`` is the Birman-Schwinger operator.
"""

import warnings

import numpy as np

from ncspec.semiclassical import circle_pair, sandwich_check, semiclassical_sweep

cutoff = 1024
pair = circle_pair({0: 1.0, 1: 0.5, -1: 0.5}, cutoff)

# at h = 1 the count is bracketed by the spectrum of K
print("bracket (lower, count, upper, holds):", sandwich_check(pair))

# the smallest h break the resolution guard N <= dim/4 and are left out
h_list = np.geomspace(0.5, 0.03, 10)
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    rep = semiclassical_sweep(pair, h_list, floor=2.0 / cutoff)
for row in rep.rows:
    print(f"h={row.h:.4f}  N={row.count:5d}  h^2 N={row.h2count:.4f}  guard_ok={row.guard_ok}")
print("excluded:", rep.excluded, "warnings:", len(caught))

###############################################################################
# The extrapolated limit next to two estimates of the integral of ``K``.

print(f"limit {rep.limit:.4f}, Weyl {rep.integral.integral:.4f}, log-mean {rep.tauberian.limit_estimate:.4f}")
