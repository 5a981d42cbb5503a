"""Discrete mass/energy functionals, error norms and convergence rates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grid import Grid3, norm_h, norm_hp, norm_inf, seminorm_1h, seminorm_h
from .model import ExactSolution, PdeParams

__all__ = [
    "DiagnosticsRow",
    "RateTable",
    "mass",
    "pair_quartic",
    "licfp_energy",
    "licfp_history_increment",
    "ifd_energy",
    "ifd_history_increment",
    "rk3_energy",
    "rk3_history_increment",
    "error_norms",
    "convergence_rates",
    "relative_residuals",
]


@dataclass
class DiagnosticsRow:
    n: int
    t: float
    mass: float
    energy: float
    rm: float
    re: float
    err_l2: float | None = None
    err_inf: float | None = None

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "mass": self.mass,
            "energy": self.energy,
            "rm": self.rm,
            "re": self.re,
            "err_l2": self.err_l2,
            "err_inf": self.err_inf,
        }


def mass(grid: Grid3, U) -> float:
    return norm_h(grid, U) ** 2


def pair_quartic(grid: Grid3, U, V) -> float:
    """``h1 h2 h3 * sum(|U|^2 |V|^2)``."""
    return grid.cell_volume * float(np.sum(np.abs(U) ** 2 * np.abs(V) ** 2))


def licfp_history_increment(grid: Grid3, U_prev, U_cur, t_prev: float, tau: float, params: PdeParams) -> float:
    """Term ``l`` of the damping history sum, with ``U_prev = U^{l-1}``,
    ``U_cur = U^l`` and ``t_prev = t_{l-1}``."""
    if params.beta == 0.0 or params.gamma == 0.0:
        return 0.0
    weight = 0.5 * params.beta * math.exp(-2.0 * params.gamma * t_prev) * -math.expm1(-2.0 * params.gamma * tau)
    return weight * pair_quartic(grid, U_prev, U_cur)


def licfp_energy(grid: Grid3, U_next, U_cur, t_cur: float, params: PdeParams, history_sum: float) -> float:
    """Energy conserved by the linearly implicit scheme.

    ``U_next, U_cur`` are ``U^{n+1}, U^n`` and ``history_sum`` is the
    accumulated damping history up to and including term ``n``.
    """
    E = 0.5 * seminorm_h(grid, U_next) ** 2 + 0.5 * seminorm_h(grid, U_cur) ** 2
    if params.beta != 0.0:
        E -= 0.5 * params.coupling(t_cur) * pair_quartic(grid, U_cur, U_next)
    return E - history_sum


def ifd_history_increment(grid: Grid3, U_prev, l: int, tau: float, params: PdeParams) -> float:
    """Term ``l`` of the IFD history sum; ``U_prev = U^{l-1}``.

    The weight is evaluated at ``t_{l-3/2}``, which is ``-tau/2`` for l = 1.
    """
    if params.beta == 0.0 or params.gamma == 0.0:
        return 0.0
    t = (l - 1.5) * tau
    weight = 0.5 * params.beta * math.exp(-2.0 * params.gamma * t) * -math.expm1(-2.0 * params.gamma * tau)
    return weight * norm_hp(grid, U_prev, 4) ** 4


def ifd_energy(grid: Grid3, U, n: int, tau: float, params: PdeParams, history_sum: float) -> float:
    """Energy conserved by the implicit finite-difference scheme at step n.

    Uses the finite-difference semi-norm; not comparable with
    ``licfp_energy``.  At n = 0 the nonlinear weight sits at ``t_{-1/2}``.
    """
    E = seminorm_1h(grid, U) ** 2
    if params.beta != 0.0:
        E -= 0.5 * params.coupling((n - 0.5) * tau) * norm_hp(grid, U, 4) ** 4
    return E - history_sum


def rk3_history_increment(grid: Grid3, U_prev, U_cur, t_prev: float, tau: float, params: PdeParams) -> float:
    """Trapezoidal step of ``gamma beta int exp(-2 gamma s) ||u||_4^4 ds``."""
    if params.beta == 0.0 or params.gamma == 0.0:
        return 0.0
    a = params.coupling(t_prev) * norm_hp(grid, U_prev, 4) ** 4
    b = params.coupling(t_prev + tau) * norm_hp(grid, U_cur, 4) ** 4
    return 0.5 * tau * params.gamma * (a + b)


def rk3_energy(grid: Grid3, U, t: float, params: PdeParams, history_sum: float) -> float:
    """Direct discretization of the continuous energy; the explicit
    scheme does not conserve it, so this only measures drift."""
    E = seminorm_h(grid, U) ** 2
    if params.beta != 0.0:
        E -= 0.5 * params.coupling(t) * norm_hp(grid, U, 4) ** 4
    return E - history_sum


def error_norms(grid: Grid3, U, t: float, exact: ExactSolution) -> tuple[float, float]:
    """L2 and max errors of ``Psi = exp(-gamma t) U`` against the exact psi."""
    diff = math.exp(-exact.params.gamma * t) * grid.check(U) - exact.psi(t, grid)
    return norm_h(grid, diff), norm_inf(grid, diff)


def convergence_rates(steps: Sequence[float], errors: Sequence[float]) -> list[float | None]:
    """``ln(e1/e2) / ln(s1/s2)`` between consecutive rows; the first entry is None."""
    steps = [float(s) for s in steps]
    errors = [float(e) for e in errors]
    if len(steps) != len(errors):
        raise ValueError("steps and errors differ in length")
    if any(not (s > 0) for s in steps) or any(not (e > 0) for e in errors):
        raise ValueError("convergence rates need positive step sizes and errors")
    rates: list[float | None] = [None]
    for (s1, e1), (s2, e2) in zip(zip(steps, errors), zip(steps[1:], errors[1:])):
        if s1 == s2:
            raise ValueError(f"repeated step size {s1}")
        rates.append(math.log(e1 / e2) / math.log(s1 / s2))
    return rates


@dataclass
class RateTable:
    """Errors per resolution (time step or point count) with observed rates.

    Rows whose run failed carry ``None`` errors and no rates around them.
    """

    label: str
    steps: list[float]
    err_l2: list[float | None]
    err_inf: list[float | None]
    rate_l2: list[float | None] = field(default_factory=list)
    rate_inf: list[float | None] = field(default_factory=list)

    def __post_init__(self):
        if not self.rate_l2:
            self.rate_l2 = self._rates(self.err_l2)
        if not self.rate_inf:
            self.rate_inf = self._rates(self.err_inf)

    def _rates(self, errors) -> list[float | None]:
        rates: list[float | None] = [None]
        for i in range(1, len(self.steps)):
            e1, e2 = errors[i - 1], errors[i]
            if e1 is None or e2 is None or e1 <= 0 or e2 <= 0:
                rates.append(None)
            else:
                rates.append(convergence_rates(self.steps[i - 1 : i + 1], [e1, e2])[1])
        return rates

    def rows(self):
        return list(zip(self.steps, self.err_l2, self.err_inf, self.rate_l2, self.rate_inf))

    def format(self) -> str:
        def f(x, spec):
            return "-" if x is None else format(x, spec)

        lines = [f"{self.label:>10}  {'L2 error':>11}  {'rate':>6}  {'Linf error':>11}  {'rate':>6}"]
        for s, e2, ei, r2, ri in self.rows():
            lines.append(f"{s:>10g}  {f(e2, '11.3e')}  {f(r2, '6.3f'):>6}  {f(ei, '11.3e')}  {f(ri, '6.3f'):>6}")
        return "\n".join(lines)


def relative_residuals(mass_n: float, mass_0: float, energy_n: float, energy_0: float) -> tuple[float, float]:
    if mass_0 == 0.0 or energy_0 == 0.0:
        raise ZeroDivisionError(
            "reference mass or energy is zero; relative residuals are undefined, report absolute residuals"
        )
    return abs((mass_n - mass_0) / mass_0), abs((energy_n - energy_0) / energy_0)
