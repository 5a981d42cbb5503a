"""Temporal and spatial convergence of the linearly implicit scheme on the
damped plane-wave solution (beta = 2, gamma = 1, K = k = 1, t = 1)."""

from dnls3d import ExactSolution, Grid3, PdeParams, RateTable, TimeGrid, run_to_time

exact = ExactSolution(PdeParams(beta=2.0, gamma=1.0))


def final_row(n, tau):
    g = Grid3.cube(n)
    rows = run_to_time(exact.u(0.0, g), "licfp", g, exact.params, TimeGrid.from_final_time(tau, 1.0),
                       sample_every=10**9, exact=exact)
    return list(rows)[-1][0]


# time step halves, grid fixed at 16^3: errors drop by ~4
taus = [0.1, 0.05, 0.025, 0.0125]
rows = [final_row(16, tau) for tau in taus]
print(RateTable("tau", taus, [r.err_l2 for r in rows], [r.err_inf for r in rows]).format())
print()

# tiny time step, grid refined: the error is already at the temporal floor at N = 4
ns = [4, 8, 16]
rows = [final_row(n, 1e-3) for n in ns]
for n, r in zip(ns, rows):
    print(f"N = {n:2d}   L2 error {r.err_l2:.3e}")
