"""Structure-preserving solvers for the 3D damped nonlinear Schrödinger equation.

The main entry points are :func:`run_to_time` and :class:`SchemeRun`; the
grid, operator and diagnostics helpers are re-exported for convenience.
"""

from .diagnostics import (
    DiagnosticsRow,
    RateTable,
    convergence_rates,
    error_norms,
    ifd_energy,
    licfp_energy,
    mass,
    relative_residuals,
)
from .grid import Grid3, TimeGrid, inner_product, norm_h, norm_hp, norm_inf, seminorm_1h, seminorm_h
from .model import ExactSolution, PdeParams
from .operators import (
    LaplacianEigs,
    apply_fd_laplacian,
    apply_spectral_laplacian,
    dense_fd_laplacian,
    dense_spectral_laplacian,
    spectral_eigs,
)
from .schemes import (
    InstabilityError,
    Scheme,
    SchemeRun,
    SolverConfig,
    SolverError,
    StepOutcome,
    ifd_step,
    li_cfp_step,
    rk3_step,
    run_to_time,
    solve_shifted,
    startup_predictor,
    startup_step,
)

__version__ = "0.1.0"
