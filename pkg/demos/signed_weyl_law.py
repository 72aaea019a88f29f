"""
Signed Weyl coefficients
========================

``f = cos x`` takes both signs, and the positive and negative eigenvalues
of ``|D|^{-1/2} f |D|^{-1/2}`` each follow their own Weyl law.  The
coefficients come from the mean of ``f_+`` and of ``f_-``, both ``1/pi``.
"""

import numpy as np

from ncspec.matops import hermitian_eig
from ncspec.models import TorusSymbolModel, symbol_weyl_rhs, torus_matrix
from ncspec.spectra import SpectralSequence, split_signed
from ncspec.weyl import counting_limit, weyl_coefficient, weyl_pm

model = TorusSymbolModel.trigonometric({1: 0.5, -1: 0.5}, cutoff=512)
seq = hermitian_eig(torus_matrix(model))
floor = model.resolution_floor()

plus, minus = weyl_pm(seq, 1.0, floor=floor)
print(f"Lambda+ = {plus.value:.4f}  Lambda- = {minus.value:.4f}  (2/pi = {2 / np.pi:.4f})")
print(f"symbol side: {symbol_weyl_rhs(model, 1.0, 'plus'):.4f} {symbol_weyl_rhs(model, 1.0, 'minus'):.4f}")

# singular values: the two halves interleave, so the coefficient doubles
mod = weyl_coefficient(SpectralSequence(np.abs(seq.values)), floor=floor)
print(f"Lambda(|A|) = {mod.value:.4f}  (4/pi = {4 / np.pi:.4f})")

###############################################################################
# Counting eigenvalues above a threshold gives the same numbers.

pos, _ = split_signed(seq)
est = counting_limit(pos, floor=floor)
print(f"counting: {est.value:.4f} +- {est.dispersion:.4f}")
