"""
Reading sparse spectra off a few samples
========================================

A signal made of K Fourier atoms is pinned down by any 2K consecutive
samples. This script fits one window and maps the roots back to frequencies.
"""

import numpy as np

from prosparse.prony import Reject, fourier_coeffs_from_model, prony_fit

N = 32
c = np.zeros(N, complex)
c[[1, 7, 30]] = [1.0, -0.5j, 2.0]
y = np.fft.ifft(c, norm="ortho")  # y = F c

# six samples starting anywhere are enough for three atoms
model = prony_fit(y[10:16], K=3, N=N, start=10)
print("frequencies:", model.grid_indices)
print("weights:", np.round(model.weights, 6))
print("recovered c matches:", np.allclose(fourier_coeffs_from_model(model, N), c))

# add a spike inside the window and the fit refuses
dirty = y.copy()
dirty[12] += 1
try:
    prony_fit(dirty[10:16], K=3, N=N, start=10)
except Reject as r:
    print("contaminated window rejected:", r.reason)

# asking for too many atoms is caught by the rank test
try:
    prony_fit(y[:8], K=4, N=N)
except Reject as r:
    print("order 4 on a 3-atom signal:", r)
