"""Long-run mass and energy residuals of the three schemes.

The two conservative schemes hold both invariants to roundoff; RK3 drifts
slowly at a small step and blows up at tau = 0.1 on a 16^3 grid.
"""

from dnls3d import ExactSolution, Grid3, InstabilityError, PdeParams, TimeGrid, run_to_time

exact = ExactSolution(PdeParams(beta=2.0, gamma=1.0))
g = Grid3.cube(16)
U0 = exact.u(0.0, g)

for scheme in ("licfp", "ifd"):
    rows = [r for r, _ in run_to_time(U0, scheme, g, exact.params, TimeGrid.from_final_time(0.1, 50.0), sample_every=50)]
    print(f"{scheme:5s}  t = 50   max RM {max(r.rm for r in rows):.2e}   max RE {max(r.re for r in rows):.2e}")

g8 = Grid3.cube(8)
rows = [r for r, _ in run_to_time(exact.u(0.0, g8), "rk3", g8, exact.params, TimeGrid.from_final_time(0.005, 5.0),
                                  sample_every=200)]
print(f"rk3    t = 5    max RM {max(r.rm for r in rows):.2e}   max RE {max(r.re for r in rows):.2e}  (tau = 0.005, N = 8)")

try:
    list(run_to_time(U0, "rk3", g, exact.params, TimeGrid.from_final_time(0.1, 1.0)))
except InstabilityError as err:
    print(f"rk3    tau = 0.1, N = 16: {err}")
