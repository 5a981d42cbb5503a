"""Discrete Laplacians on the periodic grid.

Both the pseudo-spectral Laplacian and the 7-point finite-difference Laplacian
are Kronecker sums of per-axis circulant matrices, so the 3D DFT diagonalizes
them.  Convention: the forward transform is unnormalized and the inverse
carries ``1 / (N1 N2 N3)`` (``scipy.fft`` defaults); eigenvalues multiply the
coefficients in between.
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .grid import Grid3

__all__ = [
    "LaplacianEigs",
    "spectral_eigs",
    "fft3",
    "ifft3",
    "apply_spectral_laplacian",
    "apply_fd_laplacian",
    "dense_spectral_laplacian",
    "dense_fd_laplacian",
    "DENSE_LIMIT",
]

DENSE_LIMIT = 4096


def fft_workers() -> int:
    try:
        return max(1, int(os.environ.get("DNLS_THREADS", "1")))
    except ValueError:
        return 1


def fft3(U: np.ndarray) -> np.ndarray:
    return scipy.fft.fftn(U, workers=fft_workers())


def ifft3(Uk: np.ndarray) -> np.ndarray:
    return scipy.fft.ifftn(Uk, workers=fft_workers())


def _signed_modes(n: int) -> np.ndarray:
    # 0, 1, ..., n/2, -n/2+1, ..., -1; the Nyquist entry stays +n/2
    m = np.arange(n)
    return np.where(m <= n // 2, m, m - n)


@dataclass(frozen=True, eq=False)
class LaplacianEigs:
    """Per-axis eigenvalues of the spectral (D2) and finite-difference (B)
    second-derivative matrices, in DFT order."""

    grid: Grid3
    spectral_x: np.ndarray
    spectral_y: np.ndarray
    spectral_z: np.ndarray
    fd_1: np.ndarray
    fd_2: np.ndarray
    fd_3: np.ndarray

    @property
    def spectral(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.spectral_x, self.spectral_y, self.spectral_z

    @property
    def fd(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.fd_1, self.fd_2, self.fd_3

    @functools.cached_property
    def spectral_symbol(self) -> np.ndarray:
        a, b, c = self.spectral
        return a[:, None, None] + b[None, :, None] + c[None, None, :]

    @functools.cached_property
    def fd_symbol(self) -> np.ndarray:
        a, b, c = self.fd
        return a[:, None, None] + b[None, :, None] + c[None, None, :]


@functools.lru_cache(maxsize=32)
def spectral_eigs(grid: Grid3) -> LaplacianEigs:
    spectral = []
    fd = []
    for n, h, mu in zip(grid.counts, grid.spacings, grid.wave_factors):
        spectral.append(-(mu**2) * _signed_modes(n).astype(float) ** 2)
        fd.append(-(4.0 / h**2) * np.sin(np.arange(n) * np.pi / n) ** 2)
    for arr in spectral + fd:
        arr.setflags(write=False)
    return LaplacianEigs(grid, *spectral, *fd)


def _eigs_for(U: np.ndarray, eigs: LaplacianEigs | Grid3) -> LaplacianEigs:
    if isinstance(eigs, Grid3):
        eigs = spectral_eigs(eigs)
    eigs.grid.check(U)
    return eigs


def apply_spectral_laplacian(U, eigs: LaplacianEigs | Grid3) -> np.ndarray:
    """Pseudo-spectral Laplacian of a grid function.

    ``eigs`` may be a ``LaplacianEigs`` table or the grid itself.
    """
    eigs = _eigs_for(U, eigs)
    return ifft3(eigs.spectral_symbol * fft3(U))


def apply_fd_laplacian(grid: Grid3, U) -> np.ndarray:
    """Periodic 7-point stencil, applied directly in physical space."""
    U = grid.check(U)
    out = np.zeros(U.shape, dtype=np.result_type(U.dtype, float))
    for axis, h in enumerate(grid.spacings):
        out += (np.roll(U, -1, axis=axis) - 2 * U + np.roll(U, 1, axis=axis)) / h**2
    return out


def _dft_matrix(n: int) -> np.ndarray:
    # unitary, so that F^H diag(lam) F is the circulant with eigenvalues lam
    return scipy.fft.fft(np.eye(n), axis=0, norm="ortho")


def _kron_sum(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """``I⊗I⊗A + I⊗B⊗I + C⊗I⊗I`` for the x-fastest ordering."""
    n1, n2, n3 = len(a), len(b), len(c)
    i1, i2, i3 = np.eye(n1), np.eye(n2), np.eye(n3)
    return (
        np.kron(i3, np.kron(i2, a))
        + np.kron(i3, np.kron(b, i1))
        + np.kron(c, np.kron(i2, i1))
    )


def _guard(grid: Grid3) -> None:
    if grid.size > DENSE_LIMIT:
        raise ValueError(f"dense operators are limited to {DENSE_LIMIT} points, grid has {grid.size}")


def dense_spectral_laplacian(grid: Grid3) -> np.ndarray:
    """Explicit matrix of the spectral Laplacian (small grids only)."""
    _guard(grid)
    eigs = spectral_eigs(grid)
    per_axis = []
    for lam, n in zip(eigs.spectral, grid.counts):
        F = _dft_matrix(n)
        D2 = F.conj().T @ np.diag(lam) @ F
        per_axis.append(D2.real if np.allclose(D2.imag, 0, atol=1e-12 * max(1.0, abs(lam).max())) else D2)
    return _kron_sum(*per_axis)


def dense_fd_laplacian(grid: Grid3) -> np.ndarray:
    """Explicit matrix of the periodic 7-point Laplacian (small grids only)."""
    _guard(grid)
    per_axis = []
    for n, h in zip(grid.counts, grid.spacings):
        B = -2.0 * np.eye(n) + np.eye(n, k=1) + np.eye(n, k=-1)
        B[0, -1] += 1.0
        B[-1, 0] += 1.0
        per_axis.append(B / h**2)
    return _kron_sum(*per_axis)
