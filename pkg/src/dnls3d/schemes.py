"""Time integrators for the gauge-transformed damped NLS equation.

Three schemes are provided:

* ``licfp``: the linearly implicit, mass- and energy-conserving three-level
  Fourier pseudo-spectral scheme.  Each step solves one linear system
  ``(I - i tau (Lap_h + c_n diag|U^n|^2)) W = U^{n-1}`` and sets
  ``U^{n+1} = 2 W - U^{n-1}``.  ``U^1`` comes from a Crank-Nicolson step whose
  cubic coefficient is frozen at an explicit half-step predictor, so it is
  linear as well.
* ``ifd``: the fully implicit Crank-Nicolson finite-difference scheme, solved
  by fixed-point iteration with an exact FFT solve per sweep.
* ``rk3``: the classical explicit third-order Runge-Kutta method on the
  pseudo-spectral semi-discretization.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import diagnostics as diag
from .grid import Grid3, TimeGrid, norm_h
from .model import ExactSolution, PdeParams
from .operators import apply_spectral_laplacian, fft3, ifft3, spectral_eigs

__all__ = [
    "Scheme",
    "SolverConfig",
    "StepOutcome",
    "SolverError",
    "InstabilityError",
    "solve_shifted",
    "startup_predictor",
    "startup_step",
    "li_cfp_step",
    "ifd_step",
    "rk3_rhs",
    "rk3_step",
    "SchemeRun",
    "run_to_time",
]

log = logging.getLogger(__name__)


class Scheme(str, enum.Enum):
    LICFP = "licfp"
    IFD = "ifd"
    RK3 = "rk3"


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls.

    ``method`` selects the linear solver of the linearly implicit scheme:
    ``"fourier"`` (default) splits the system into a shifted Laplacian that
    is inverted exactly in Fourier space plus the fluctuating part of the
    potential; ``"jacobi"`` is plain pointwise Jacobi, which only converges
    when ``tau * max|Lap_h|`` is small.
    """

    tol: float = 1e-14
    max_iters: int = 500
    method: str = "fourier"

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters}")
        if self.method not in ("fourier", "jacobi"):
            raise ValueError(f"unknown linear solver {self.method!r}")


@dataclass
class StepOutcome:
    field: np.ndarray
    iterations: int
    residual: float


class SolverError(RuntimeError):
    def __init__(self, message: str, residual: float, iterations: int, step: int | None = None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.step = step

    def __str__(self):
        where = f"step {self.step}: " if self.step is not None else ""
        return f"{where}{self.args[0]} (residual {self.residual:.3e} after {self.iterations} iterations)"


class InstabilityError(RuntimeError):
    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step

    def __str__(self):
        where = f"step {self.step}: " if self.step is not None else ""
        return where + self.args[0]


def solve_shifted(
    grid: Grid3,
    rhs,
    potential,
    tau: float,
    coeff: float,
    cfg: SolverConfig = SolverConfig(),
) -> StepOutcome:
    """Solve ``(I - i tau Lap_h - i tau coeff diag(potential)) x = rhs``.

    The matrix is the identity plus a skew-Hermitian part, hence always
    invertible.  Iteration stops once ``||A x - rhs||_h <= tol * max(1, ||rhs||_h)``,
    or once it reaches the roundoff floor ``eps ||A|| ||rhs||_h`` of evaluating
    the residual (``||x|| <= ||rhs||`` because A is identity plus skew).
    """
    rhs = np.asarray(grid.check(rhs), dtype=complex)
    V = np.asarray(grid.check(potential), dtype=float)
    lam = spectral_eigs(grid).spectral_symbol
    b_norm = norm_h(grid, rhs)
    a_norm = 1.0 + abs(tau) * (float(np.max(np.abs(lam))) + abs(coeff) * float(np.max(np.abs(V), initial=0.0)))
    target = max(cfg.tol * max(1.0, b_norm), np.finfo(float).eps * a_norm * b_norm)

    def apply_A(x):
        return x - 1j * tau * (ifft3(lam * fft3(x)) + coeff * V * x)

    if cfg.method == "jacobi":
        diag_lap = sum(float(np.mean(a)) for a in spectral_eigs(grid).spectral)
        d = 1.0 - 1j * tau * (diag_lap + coeff * V)
        x = rhs / d
        for it in range(1, cfg.max_iters + 1):
            r = rhs - apply_A(x)
            res = norm_h(grid, r)
            if res <= target:
                return StepOutcome(x, it, res)
            if not math.isfinite(res):
                break
            x = x + r / d
        raise SolverError("Jacobi iteration did not converge", res, it)

    # The mean of the potential goes into the exactly inverted part; only
    # the fluctuation is iterated on, so a constant potential needs one sweep.
    vbar = float(np.mean(V))
    dinv = 1.0 / (1.0 - 1j * tau * (lam + coeff * vbar))
    dV = 1j * tau * coeff * (V - vbar)
    x = np.zeros_like(rhs)
    res = math.inf
    for it in range(1, cfg.max_iters + 1):
        x = ifft3(dinv * fft3(rhs + dV * x))
        res = norm_h(grid, apply_A(x) - rhs)
        if res <= target:
            return StepOutcome(x, it, res)
        if not math.isfinite(res):
            break
    raise SolverError("shifted Laplacian splitting did not converge; reduce tau", res, it)


def startup_predictor(grid: Grid3, U0, params: PdeParams, tau: float) -> np.ndarray:
    """Explicit half-step ``U0 + (tau/2) i (Lap_h U0 + beta |U0|^2 U0)``."""
    U0 = np.asarray(grid.check(U0), dtype=complex)
    return U0 + 0.5j * tau * (apply_spectral_laplacian(U0, grid) + params.coupling(0.0) * np.abs(U0) ** 2 * U0)


def startup_step(grid: Grid3, U0, params: PdeParams, tau: float, cfg: SolverConfig = SolverConfig()) -> StepOutcome:
    """First step: Crank-Nicolson with the cubic coefficient frozen at the predictor."""
    U0 = np.asarray(grid.check(U0), dtype=complex)
    V = np.abs(startup_predictor(grid, U0, params, tau)) ** 2
    c = params.coupling(0.5 * tau)
    rhs = U0 + 0.5j * tau * (apply_spectral_laplacian(U0, grid) + c * V * U0)
    return solve_shifted(grid, rhs, V, 0.5 * tau, c, cfg)


def li_cfp_step(
    grid: Grid3,
    U_cur,
    U_prev,
    t_cur: float,
    params: PdeParams,
    tau: float,
    cfg: SolverConfig = SolverConfig(),
) -> StepOutcome:
    """Advance the three-level scheme from ``(U^n, U^{n-1})`` to ``U^{n+1}``."""
    U_cur = grid.check(U_cur)
    U_prev = np.asarray(grid.check(U_prev), dtype=complex)
    out = solve_shifted(grid, U_prev, np.abs(U_cur) ** 2, tau, params.coupling(t_cur), cfg)
    out.field = 2.0 * out.field - U_prev
    return out


def ifd_step(
    grid: Grid3,
    U_cur,
    t_cur: float,
    params: PdeParams,
    tau: float,
    cfg: SolverConfig = SolverConfig(),
) -> StepOutcome:
    """One step of the implicit finite-difference scheme.

    Fixed-point iteration on the midpoint value ``W = (U^{n+1} + U^n) / 2``;
    each sweep solves ``(i/tau + Lap_1h / 2) W = b`` exactly with the
    finite-difference eigenvalues.  Stops when the max-norm change between
    sweeps is at most ``tol * max(1, max|U^n|)``.
    """
    U = np.asarray(grid.check(U_cur), dtype=complex)
    dinv = 1.0 / (1.0 - 0.5j * tau * spectral_eigs(grid).fd_symbol)
    c = 0.25j * tau * params.coupling(t_cur + 0.5 * tau)
    absU2 = np.abs(U) ** 2
    target = cfg.tol * max(1.0, float(np.max(np.abs(U))))
    W = U
    change = math.inf
    for it in range(1, cfg.max_iters + 1):
        nonlin = (np.abs(2.0 * W - U) ** 2 + absU2) * W
        W_new = ifft3(dinv * fft3(U + c * nonlin))
        change = float(np.max(np.abs(W_new - W)))
        W = W_new
        if change <= target:
            return StepOutcome(2.0 * W - U, it, change)
        if not math.isfinite(change):
            break
    raise SolverError("IFD fixed-point iteration did not converge; reduce tau", change, it)


def rk3_rhs(grid: Grid3, U, t: float, params: PdeParams) -> np.ndarray:
    return 1j * (apply_spectral_laplacian(U, grid) + params.coupling(t) * np.abs(U) ** 2 * U)


def rk3_step(grid: Grid3, U, t: float, params: PdeParams, tau: float) -> np.ndarray:
    U = np.asarray(grid.check(U), dtype=complex)
    K1 = rk3_rhs(grid, U, t, params)
    K2 = rk3_rhs(grid, U + 0.5 * tau * K1, t + 0.5 * tau, params)
    K3 = rk3_rhs(grid, U - tau * K1 + 2.0 * tau * K2, t + tau, params)
    new = U + (tau / 6.0) * (K1 + 4.0 * K2 + K3)
    if not np.all(np.isfinite(new)):
        raise InstabilityError("RK3 produced non-finite values; the explicit method is unstable here, reduce tau")
    return new


# RK3 runs are flagged unstable once the mass grows by this factor; the exact
# mass never increases.
RK3_GROWTH_LIMIT = 1e6


class SchemeRun:
    """Mutable time-stepping state for one scheme on one grid.

    ``energy()`` reports the scheme's own conserved energy for the newest
    available data.  For ``licfp`` that is the pair ``(U^n, U^{n-1})``, i.e.
    ``E^{n-1}``; at ``n = 0`` the first step is computed ahead of time so
    that ``E^0`` (built from ``U^1, U^0``) is available.
    """

    def __init__(
        self,
        scheme: Scheme | str,
        initial,
        grid: Grid3,
        params: PdeParams,
        tau: float,
        cfg: SolverConfig = SolverConfig(),
    ):
        if not tau > 0:
            raise ValueError(f"time step must be positive, got {tau}")
        self.scheme = Scheme(scheme)
        self.grid = grid
        self.params = params
        self.tau = float(tau)
        self.cfg = cfg
        self.n = 0
        self.current = np.array(grid.check(initial), dtype=complex)
        self.previous: np.ndarray | None = None
        self.history = 0.0
        self.last: StepOutcome | None = None
        self._initial_mass = diag.mass(grid, self.current)
        self._lookahead: StepOutcome | None = None

    @property
    def t(self) -> float:
        return self.n * self.tau

    def _startup(self) -> StepOutcome:
        if self._lookahead is None:
            try:
                self._lookahead = startup_step(self.grid, self.current, self.params, self.tau, self.cfg)
            except SolverError as err:
                err.step = 1
                raise
        return self._lookahead

    def advance(self) -> StepOutcome:
        g, p, tau, n = self.grid, self.params, self.tau, self.n
        try:
            if self.scheme is Scheme.LICFP:
                if n == 0:
                    out = self._startup()
                    self._lookahead = None
                else:
                    out = li_cfp_step(g, self.current, self.previous, self.t, p, tau, self.cfg)
                    self.history += diag.licfp_history_increment(g, self.previous, self.current, (n - 1) * tau, tau, p)
            elif self.scheme is Scheme.IFD:
                out = ifd_step(g, self.current, self.t, p, tau, self.cfg)
                self.history += diag.ifd_history_increment(g, self.current, n + 1, tau, p)
            else:
                new = rk3_step(g, self.current, self.t, p, tau)
                if diag.mass(g, new) > RK3_GROWTH_LIMIT * max(self._initial_mass, 1e-300):
                    raise InstabilityError("RK3 solution is blowing up; the explicit method is unstable here, reduce tau")
                out = StepOutcome(new, 0, 0.0)
                self.history += diag.rk3_history_increment(g, self.current, new, self.t, tau, p)
        except (SolverError, InstabilityError) as err:
            err.step = n + 1
            raise
        self.previous, self.current = self.current, out.field
        self.n += 1
        self.last = out
        return out

    def energy(self) -> float:
        g, p = self.grid, self.params
        if self.scheme is Scheme.LICFP:
            if self.n == 0:
                return diag.licfp_energy(g, self._startup().field, self.current, 0.0, p, 0.0)
            return diag.licfp_energy(g, self.current, self.previous, (self.n - 1) * self.tau, p, self.history)
        if self.scheme is Scheme.IFD:
            return diag.ifd_energy(g, self.current, self.n, self.tau, p, self.history)
        return diag.rk3_energy(g, self.current, self.t, p, self.history)


def run_to_time(
    initial,
    scheme: Scheme | str,
    grid: Grid3,
    params: PdeParams,
    tgrid: TimeGrid,
    cfg: SolverConfig = SolverConfig(),
    sample_every: int = 1,
    exact: ExactSolution | None = None,
) -> Iterator[tuple[diag.DiagnosticsRow, np.ndarray]]:
    """March to ``tgrid.t_final`` yielding ``(row, U^n)`` at sample steps.

    Step 0 and the final step are always sampled.  Solver failures propagate
    with ``.step`` set to the failing step index.
    """
    if int(sample_every) != sample_every or sample_every < 1:
        raise ValueError(f"sample_every must be a positive integer, got {sample_every}")
    if exact is not None:
        exact.check_grid(grid)
    run = SchemeRun(scheme, initial, grid, params, tgrid.tau, cfg)
    mass0 = energy0 = None
    warned = False

    def sample():
        nonlocal mass0, energy0, warned
        m = diag.mass(grid, run.current)
        e = run.energy()
        if mass0 is None:
            mass0, energy0 = m, e
        try:
            rm, re = diag.relative_residuals(m, mass0, e, energy0)
        except ZeroDivisionError as err:
            if not warned:
                log.warning("%s; falling back to absolute residuals", err)
                warned = True
            rm = abs(m - mass0) / mass0 if mass0 else abs(m - mass0)
            re = abs(e - energy0) / energy0 if energy0 else abs(e - energy0)
        row = diag.DiagnosticsRow(run.n, run.t, m, e, rm, re)
        if exact is not None:
            row.err_l2, row.err_inf = diag.error_norms(grid, run.current, run.t, exact)
        return row, run.current

    yield sample()
    for n in range(1, tgrid.steps + 1):
        run.advance()
        if n % sample_every == 0 or n == tgrid.steps:
            yield sample()
