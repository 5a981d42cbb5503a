"""Errors of the three schemes at tau = 0.005, h = pi/4, t = 1.

The implicit finite-difference scheme is limited by its second-order
spatial error, so it is far less accurate than both spectral schemes.
"""

import time

from dnls3d import ExactSolution, Grid3, PdeParams, TimeGrid, run_to_time

exact = ExactSolution(PdeParams(beta=2.0, gamma=1.0))
g = Grid3.cube(8)
tg = TimeGrid.from_final_time(0.005, 1.0)

for scheme in ("licfp", "ifd", "rk3"):
    start = time.perf_counter()
    row = list(run_to_time(exact.u(0.0, g), scheme, g, exact.params, tg, sample_every=10**9, exact=exact))[-1][0]
    elapsed = time.perf_counter() - start
    print(f"{scheme:5s}  L2 {row.err_l2:.3e}   Linf {row.err_inf:.3e}   {elapsed:.2f} s")
