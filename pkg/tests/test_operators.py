import math

import numpy as np
import pytest

import oracle
from conftest import random_field
from dnls3d.grid import Grid3, inner_product, norm_h, seminorm_h
from dnls3d.operators import (
    apply_fd_laplacian,
    apply_spectral_laplacian,
    dense_fd_laplacian,
    dense_spectral_laplacian,
    spectral_eigs,
)

SMALL_GRIDS = [Grid3.cube(2), Grid3.cube(4), Grid3((4, 2, 2)), Grid3((4, 2, 6), (1.0, 3.0, 2.0))]


def test_spectral_eigs_n4():
    e = spectral_eigs(Grid3.cube(4))
    np.testing.assert_array_equal(e.spectral_x, [0.0, -1.0, -4.0, -1.0])
    np.testing.assert_allclose(e.fd_1, -(16 / math.pi**2) * np.array([0, 0.5, 1, 0.5]), rtol=1e-14, atol=1e-14)


def test_eig_tables_scale_with_length():
    g = Grid3((6, 4, 8), (1.0, 2.0, 4 * math.pi))
    e = spectral_eigs(g)
    assert e.spectral_x[3] == pytest.approx(-((2 * math.pi) ** 2) * 9)
    assert e.spectral_z[-1] == pytest.approx(-(0.5**2))
    for table in e.spectral + e.fd:
        assert table[0] == 0.0
        assert np.all(table <= 0)


def test_eigenvalue_sandwich():
    for n in (2, 4, 8, 16, 64):
        e = spectral_eigs(Grid3.cube(n))
        for spec, fd in zip(e.spectral, e.fd):
            assert np.all((4 / math.pi**2) * np.abs(spec) <= np.abs(fd) * (1 + 1e-14))
            assert np.all(np.abs(fd) <= np.abs(spec) * (1 + 1e-14))


def test_spectral_laplacian_kills_constants():
    g = Grid3.cube(8)
    out = apply_spectral_laplacian(np.full(g.shape, 2.0 + 1j), g)
    assert np.max(np.abs(out)) < 1e-12


def test_spectral_laplacian_plane_wave():
    g = Grid3.cube(8)
    X, Y, Z = g.coords()
    U = np.exp(1j * (X + Y + Z))
    np.testing.assert_allclose(apply_spectral_laplacian(U, g), -3 * U, atol=1e-12)


def test_spectral_laplacian_nyquist_is_not_zeroed():
    g = Grid3.cube(8)
    X, _, _ = g.coords()
    U = np.cos(4 * X).astype(complex)
    np.testing.assert_allclose(apply_spectral_laplacian(U, g), -16 * U, atol=1e-12)


def test_fd_laplacian_plane_wave():
    g = Grid3.cube(8)
    X, _, _ = g.coords()
    U = np.exp(1j * X)
    h = g.spacings[0]
    lam = -(4 / h**2) * math.sin(h / 2) ** 2
    assert lam == pytest.approx(spectral_eigs(g).fd_1[1], rel=1e-14)
    np.testing.assert_allclose(apply_fd_laplacian(g, U), lam * U, atol=1e-12)
    assert np.max(np.abs(apply_fd_laplacian(g, np.ones(g.shape)))) == 0.0


@pytest.mark.parametrize("grid", SMALL_GRIDS, ids=lambda g: "x".join(map(str, g.counts)))
def test_fast_paths_match_cardinal_and_stencil_oracles(rng, grid):
    S = oracle.dense_spectral(grid)
    B = oracle.dense_stencil(grid)
    for _ in range(20):
        U = random_field(rng, grid)
        v = oracle.to_vector(grid, U)
        ref_s = oracle.from_vector(grid, S @ v)
        ref_b = oracle.from_vector(grid, B @ v)
        scale = max(1.0, norm_h(grid, ref_s))
        assert norm_h(grid, apply_spectral_laplacian(U, grid) - ref_s) <= 1e-12 * scale
        scale = max(1.0, norm_h(grid, ref_b))
        assert norm_h(grid, apply_fd_laplacian(grid, U) - ref_b) <= 1e-12 * scale


@pytest.mark.parametrize("grid", SMALL_GRIDS, ids=lambda g: "x".join(map(str, g.counts)))
def test_dense_builders_match_oracles(grid):
    S = dense_spectral_laplacian(grid)
    B = dense_fd_laplacian(grid)
    scale = max(1.0, np.abs(S).max())
    assert np.abs(S - oracle.dense_spectral(grid)).max() <= 1e-12 * scale
    assert np.abs(B - oracle.dense_stencil(grid)).max() <= 1e-12 * max(1.0, np.abs(B).max())
    for M in (S, B):
        assert np.abs(M - M.conj().T).max() <= 1e-12 * max(1.0, np.abs(M).max())
        assert np.abs(M.sum(axis=1)).max() <= 1e-12 * max(1.0, np.abs(M).max())


def test_dense_fd_row_sums_on_2cube():
    B = dense_fd_laplacian(Grid3.cube(2))
    np.testing.assert_allclose(B.sum(axis=1), 0.0, atol=1e-14)


def test_dense_spectrum_is_all_eigenvalue_sums():
    g = Grid3.cube(4)
    e = spectral_eigs(g)
    expected = np.sort(e.spectral_symbol.ravel())
    got = np.sort(np.linalg.eigvalsh(dense_spectral_laplacian(g)))
    np.testing.assert_allclose(got, expected, atol=1e-11)


def test_dense_size_guard():
    with pytest.raises(ValueError):
        dense_spectral_laplacian(Grid3.cube(18))
    with pytest.raises(ValueError):
        dense_fd_laplacian(Grid3((32, 16, 10)))


def test_negative_semidefinite_and_hermitian(rng):
    g = Grid3((8, 6, 4), (2.0, 1.0, 3.0))
    for _ in range(20):
        U = random_field(rng, g)
        scale = norm_h(g, U) ** 2
        for L in (apply_spectral_laplacian(U, g), apply_fd_laplacian(g, U)):
            q = inner_product(g, -L, U)
            assert q.real >= -1e-12 * scale
        assert abs(inner_product(g, apply_spectral_laplacian(U, g), U).imag) <= 1e-12 * seminorm_h(g, U) ** 2


def test_grid_mismatch_raises():
    g = Grid3.cube(4)
    with pytest.raises(ValueError):
        apply_spectral_laplacian(np.ones((4, 4, 2)), g)
    with pytest.raises(ValueError):
        apply_fd_laplacian(g, np.ones((2, 2, 2)))
