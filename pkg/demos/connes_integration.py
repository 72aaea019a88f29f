"""
Integrating a potential on the circle
=====================================

For ``f(x) = 2 + cos x`` the operator ``|D|^{-1/2} f |D|^{-1/2}`` on the
circle has eigenvalues ``~ 4 / j``.  Three routes to the number 4: the
symbol prediction, the log-mean of the spectrum and its Weyl tail.
"""

from ncspec.matops import hermitian_eig
from ncspec.models import (TorusSymbolModel, nc_residue_quadrature, predicted_connes_integral,
                           torus_matrix)
from ncspec.spectra import tauberian_limit
from ncspec.weyl import weyl_to_integral

model = TorusSymbolModel.trigonometric({0: 2.0, 1: 0.5, -1: 0.5}, cutoff=512)
print("predicted:", predicted_connes_integral(model))
print("residue:  ", nc_residue_quadrature(model))

# the matrix is tridiagonal, so this solve is fast; pass method="jacobi"
# to use the rotation solver instead
seq = hermitian_eig(torus_matrix(model))
log_mean = tauberian_limit(seq)
print(f"log-mean: {log_mean.limit_estimate:.4f} (dispersion {log_mean.dispersion:.3f})")

###############################################################################
# The log-mean converges like ``1/log N`` and is still a percent off.  The
# tail ``j * lambda_j`` settles much faster once values below the
# resolution floor are dropped.

rep = weyl_to_integral(seq, floor=model.resolution_floor())
print(f"Weyl: {rep.integral:.4f} (Lambda+ {rep.plus.value:.4f}, Lambda- {rep.minus.value:.4f})")
