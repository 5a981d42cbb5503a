"""The damped NLS model and its plane-wave solution.

    i psi_t + Lap psi + beta |psi|^2 psi + i gamma psi = 0

With ``u = exp(gamma t) psi`` the damping moves into the nonlinearity,
``i u_t + Lap u + beta exp(-2 gamma t) |u|^2 u = 0``; every scheme in this
package evolves ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid3

__all__ = ["PdeParams", "ExactSolution"]


@dataclass(frozen=True)
class PdeParams:
    beta: float = 2.0
    gamma: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.beta):
            raise ValueError("beta must be finite")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")

    def coupling(self, t: float) -> float:
        """Effective cubic coefficient ``beta * exp(-2 gamma t)`` of the u-equation."""
        return self.beta * math.exp(-2.0 * self.gamma * t)


@dataclass(frozen=True)
class ExactSolution:
    """``psi = K exp(-gamma t) exp(i (k.x - delta(t)))``.

    ``wave`` holds integer mode numbers; the physical wave number along axis r
    is ``wave[r] * 2 pi / l_r`` so the solution is periodic on any box.
    """

    params: PdeParams
    amplitude: complex = 1.0
    wave: tuple[int, int, int] = (1, 1, 1)

    def __post_init__(self):
        wave = tuple(self.wave)
        if len(wave) != 3 or any(int(k) != k for k in wave):
            raise ValueError(f"wave numbers must be three integers, got {self.wave}")
        object.__setattr__(self, "wave", tuple(int(k) for k in wave))
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    def check_grid(self, grid: Grid3) -> None:
        for k, n in zip(self.wave, grid.counts):
            if abs(k) > n // 2:
                raise ValueError(f"wave number {k} is not resolved by {n} points")

    def wave_numbers(self, grid: Grid3) -> np.ndarray:
        return np.array(self.wave, dtype=float) * np.array(grid.wave_factors)

    def phase(self, t: float, grid: Grid3) -> float:
        """delta(t); the gamma -> 0 limit is taken analytically."""
        ksq = float(np.sum(self.wave_numbers(grid) ** 2))
        b = self.params.beta * abs(self.amplitude) ** 2
        g = self.params.gamma
        if g == 0.0:
            return ksq * t - b * t
        return ksq * t + b / (2.0 * g) * math.expm1(-2.0 * g * t)

    def u(self, t: float, grid: Grid3) -> np.ndarray:
        """Gauge-transformed field ``exp(gamma t) psi`` on the grid."""
        self.check_grid(grid)
        X, Y, Z = grid.coords()
        k1, k2, k3 = self.wave_numbers(grid)
        return self.amplitude * np.exp(1j * (k1 * X + k2 * Y + k3 * Z - self.phase(t, grid)))

    def psi(self, t: float, grid: Grid3) -> np.ndarray:
        return math.exp(-self.params.gamma * t) * self.u(t, grid)
