"""Periodic collocation grid, grid functions and discrete norms.

A grid function on a ``Grid3`` is a complex ndarray of shape ``(N1, N2, N3)``
indexed ``U[j1, j2, j3]``.  Whenever a grid function has to be viewed as a
vector (dense operators, snapshot files) it is flattened with ``j1`` fastest,
then ``j2``, then ``j3``; this is Fortran order for the ``(N1, N2, N3)``
array and makes ``kron(C, kron(B, A))`` act with ``A`` along x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid3",
    "TimeGrid",
    "inner_product",
    "norm_h",
    "norm_hp",
    "norm_inf",
    "seminorm_1h",
    "seminorm_h",
]


@dataclass(frozen=True)
class Grid3:
    """Uniform periodic grid on ``[0, l1] x [0, l2] x [0, l3]``.

    Every point count must be even; the Nyquist handling of the spectral
    Laplacian depends on it.
    """

    counts: tuple[int, int, int]
    lengths: tuple[float, float, float] = (2 * math.pi, 2 * math.pi, 2 * math.pi)

    def __post_init__(self):
        counts = tuple(int(n) for n in self.counts)
        lengths = tuple(float(l) for l in self.lengths)
        if len(counts) != 3 or len(lengths) != 3:
            raise ValueError("Grid3 needs exactly three counts and three lengths")
        for n, raw in zip(counts, self.counts):
            if n != raw or n < 2 or n % 2:
                raise ValueError(f"grid counts must be even integers >= 2, got {self.counts}")
        for l in lengths:
            if not (l > 0 and math.isfinite(l)):
                raise ValueError(f"domain lengths must be positive, got {self.lengths}")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def cube(cls, n: int, length: float = 2 * math.pi) -> "Grid3":
        return cls((n, n, n), (length, length, length))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.counts

    @property
    def size(self) -> int:
        n1, n2, n3 = self.counts
        return n1 * n2 * n3

    @property
    def spacings(self) -> tuple[float, float, float]:
        return tuple(l / n for l, n in zip(self.lengths, self.counts))

    @property
    def h(self) -> float:
        """Largest spacing."""
        return max(self.spacings)

    @property
    def cell_volume(self) -> float:
        h1, h2, h3 = self.spacings
        return h1 * h2 * h3

    @property
    def wave_factors(self) -> tuple[float, float, float]:
        return tuple(2 * math.pi / l for l in self.lengths)

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.arange(n) * h for n, h in zip(self.counts, self.spacings))

    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coordinate arrays ``X, Y, Z`` of shape ``(N1, N2, N3)``."""
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape, dtype=complex)

    def flatten(self, U: np.ndarray) -> np.ndarray:
        """x-fastest vector view of a grid function."""
        return self.check(U).ravel(order="F")

    def unflatten(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if v.shape != (self.size,):
            raise ValueError(f"expected a vector of length {self.size}, got shape {v.shape}")
        return v.reshape(self.shape, order="F")

    def check(self, U) -> np.ndarray:
        U = np.asarray(U)
        if U.shape != self.shape:
            raise ValueError(f"grid function has shape {U.shape}, grid expects {self.shape}")
        return U


@dataclass(frozen=True)
class TimeGrid:
    tau: float
    steps: int

    def __post_init__(self):
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ValueError(f"time step must be positive, got {self.tau}")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ValueError(f"step count must be a non-negative integer, got {self.steps}")

    @classmethod
    def from_final_time(cls, tau: float, t_final: float) -> "TimeGrid":
        """Uniform partition of ``[0, t_final]``; ``tau`` must divide ``t_final``."""
        if tau <= 0:
            raise ValueError(f"time step must be positive, got {tau}")
        if t_final < 0:
            raise ValueError(f"final time must be non-negative, got {t_final}")
        steps = round(t_final / tau)
        if abs(steps * tau - t_final) > 1e-9 * max(1.0, abs(t_final)):
            raise ValueError(f"tau={tau} does not divide T={t_final}")
        return cls(tau, steps)

    @property
    def t_final(self) -> float:
        return self.steps * self.tau

    def time(self, n: float) -> float:
        return n * self.tau


def inner_product(grid: Grid3, U, V) -> complex:
    """``h1 h2 h3 * sum(U * conj(V))``."""
    U = grid.check(U)
    V = grid.check(V)
    return complex(grid.cell_volume * np.vdot(V, U))


def norm_h(grid: Grid3, U) -> float:
    U = grid.check(U)
    return math.sqrt(grid.cell_volume * float(np.sum(np.abs(U) ** 2)))


def norm_hp(grid: Grid3, U, p: float) -> float:
    if not (p >= 1 and math.isfinite(p)):
        raise ValueError(f"p must be finite and >= 1, got {p}")
    U = grid.check(U)
    return (grid.cell_volume * float(np.sum(np.abs(U) ** p))) ** (1.0 / p)


def norm_inf(grid: Grid3, U) -> float:
    U = grid.check(U)
    return float(np.max(np.abs(U)))


def seminorm_1h(grid: Grid3, U) -> float:
    """Discrete H1 semi-norm built from periodic forward differences."""
    U = grid.check(U)
    total = 0.0
    for axis, h in enumerate(grid.spacings):
        d = (np.roll(U, -1, axis=axis) - U) / h
        total += float(np.sum(np.abs(d) ** 2))
    return math.sqrt(grid.cell_volume * total)


def seminorm_h(grid: Grid3, U) -> float:
    """Semi-norm induced by the pseudo-spectral Laplacian.

    Evaluated through Parseval, so the quadratic form is a sum of
    non-negative terms and never needs clamping.
    """
    from .operators import fft3, spectral_eigs

    U = grid.check(U)
    symbol = spectral_eigs(grid).spectral_symbol
    Uk = fft3(U)
    q = float(np.sum(-symbol * np.abs(Uk) ** 2)) / grid.size
    return math.sqrt(grid.cell_volume * q)
