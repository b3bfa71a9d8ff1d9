"""The operator L in two discretizations.

Fourth-order finite differences approach the spectral result at the
expected rate; the table shows errors falling by about 16x per halving.
"""
import math

import numpy as np

from attcone import GridSpec, ScalarField, TransformParams
from attcone.rangeops import L_apply_fd, L_apply_spectral

params = TransformParams(1.0, math.pi / 4, 1)
prev = None
for n in (32, 64, 128, 256):
    grid = GridSpec.from_extent((n, n), -2.0, 2.0)
    x, z = grid.mesh()
    g = ScalarField(grid, np.broadcast_to(np.exp(-(x**2 + z**2) / 0.18), grid.dims))
    diff = (L_apply_fd(g, params).values - L_apply_spectral(g, params).values)[2:-2, 2:-2]
    err = math.sqrt(np.sum(diff**2) * grid.cell_volume)
    rate = "" if prev is None else f"  order {math.log2(prev / err):.2f}"
    print(f"{n:4d}^2  fd - spectral = {err:.3e}{rate}")
    prev = err
