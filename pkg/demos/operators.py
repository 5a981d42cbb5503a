"""The two discrete Laplacians and their semi-norms.

Per mode the finite-difference eigenvalue is ``(4/h^2) sin^2(k h/2)``
against ``k^2`` for the spectral one, so the spectral semi-norm exceeds
the finite-difference one by at most pi/2, reached at the Nyquist mode.
"""

import numpy as np

from dnls3d import Grid3, seminorm_1h, seminorm_h, spectral_eigs

g = Grid3.cube(16)
e = spectral_eigs(g)
print(" k  |spectral|  |finite diff|   ratio")
for k in range(0, 9):
    s, f = abs(e.spectral_x[k]), abs(e.fd_1[k])
    print(f"{k:2d}  {s:10.3f}  {f:13.3f}   {f / s if s else 1.0:.3f}")

rng = np.random.default_rng(1)
ratios = []
for _ in range(200):
    U = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    ratios.append(seminorm_h(g, U) / seminorm_1h(g, U))
print(f"\nrandom fields: |U|_h / |U|_1h in [{min(ratios):.4f}, {max(ratios):.4f}], bound pi/2 = {np.pi / 2:.4f}")
