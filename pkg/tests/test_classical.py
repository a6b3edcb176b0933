import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from qfpe.classical import (
    build_drift_generator,
    build_generator,
    classical_diffusion_spectral,
    expm_apply,
)
from qfpe.errors import InvalidArgumentError, NumericalConsistencyError
from qfpe.grid import PhaseSpaceGrid, build_grid, gaussian_density, vectorize
from qfpe.spectral import dvv_matrix, dx_matrix


def hand_generator(grid, nu):
    """Entry-by-entry assembly over (j, i) pairs, independent of any Kronecker routine."""
    Nx, Nv = grid.N_x, grid.N_v
    Dx = dx_matrix(Nx, grid.delta_x).matrix
    Dvv = dvv_matrix(Nv, grid.delta_v).matrix
    v = grid.v_axis
    L = np.zeros((Nx * Nv, Nx * Nv))
    for j in range(Nv):
        for i in range(Nx):
            for jj in range(Nv):
                for ii in range(Nx):
                    val = 0.0
                    if j == jj:
                        val -= v[j] * Dx[i, ii]
                    if i == ii:
                        val += nu * Dvv[j, jj]
                    L[j * Nx + i, jj * Nx + ii] = val
    return L


def test_two_by_two_example():
    grid = PhaseSpaceGrid(1, 1, 1.0, 1.0, 0.0, 0.0)
    L = build_generator(grid, 1.0).toarray()
    # N=2: S_- == S_+, so D_x vanishes and only diffusion survives
    Dvv = np.array([[-2.0, 2.0], [2.0, -2.0]])
    np.testing.assert_array_equal(L, np.kron(Dvv, np.eye(2)))
    np.testing.assert_array_equal(L, hand_generator(grid, 1.0))


@pytest.mark.parametrize("nu", [0.0, 0.5, 2.0])
def test_generator_matches_hand_assembly(small_grid, nu):
    np.testing.assert_allclose(build_generator(small_grid, nu).toarray(), hand_generator(small_grid, nu),
                               rtol=0, atol=1e-14)


def test_drift_generator_definition(small_grid):
    L = build_drift_generator(small_grid).toarray()
    Dx = dx_matrix(small_grid.N_x, small_grid.delta_x).matrix
    np.testing.assert_array_equal(L, -np.kron(np.diag(small_grid.v_axis), Dx))


def test_zero_velocity_block_has_no_drift():
    grid = build_grid(2, 2, 1.0, 0.0, 0.0, 3.0)
    L = build_drift_generator(grid).toarray()
    # velocity index 0 has v = 0, so its diagonal block vanishes
    assert np.all(L[:4, :4] == 0)
    assert np.abs(L[4:8, 4:8]).max() > 0


def test_columns_sum_to_zero():
    grid = build_grid(3, 3, 0.7, 0.0, -2.0, 3.0)
    L = build_generator(grid, 0.8).toarray()
    assert np.abs(L.sum(axis=0)).max() < 1e-12


def test_rejects_negative_nu(small_grid):
    with pytest.raises(InvalidArgumentError):
        build_generator(small_grid, -0.1)


def test_expm_examples():
    p = np.array([0.3, 0.7])
    np.testing.assert_array_equal(expm_apply(np.eye(2), 0.0, p), p)
    d = np.array([-1.0, 0.5, 2.0])
    np.testing.assert_allclose(expm_apply(np.diag(d), 0.7, np.ones(3)), np.exp(0.7 * d), rtol=1e-12)
    np.testing.assert_allclose(expm_apply(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0, np.array([0.0, 1.0])), [1, 1],
                               atol=1e-14)


def test_expm_errors():
    with pytest.raises(InvalidArgumentError):
        expm_apply(np.eye(3), 1.0, np.ones(2))
    with pytest.raises(InvalidArgumentError):
        expm_apply(np.eye(2), -1.0, np.ones(2))
    with pytest.raises(NumericalConsistencyError):
        expm_apply(np.array([[np.nan, 0], [0, 1]]), 1.0, np.ones(2))
    with pytest.raises(InvalidArgumentError):
        expm_apply(np.eye(2), 1.0, np.ones(2), method="krylov")


def test_action_path_matches_dense(rng):
    for n_x, n_v in [(2, 2), (3, 4), (4, 4)]:
        grid = build_grid(n_x, n_v, 1.0, 0.0, -2.0, 2.5)
        L = build_generator(grid, 0.4)
        p = rng.random(grid.size)
        p /= p.sum()
        dense = expm_apply(L, 1.3, p, method="dense")
        action = expm_apply(L, 1.3, p, method="action")
        assert np.linalg.norm(action - dense) / np.linalg.norm(dense) < 1e-9
        # taylor-series oracle, many small steps
        A = L.toarray() * (1.3 / 64)
        ref = p.copy()
        for _ in range(64):
            term, acc = ref.copy(), ref.copy()
            for k in range(1, 30):
                term = A @ term / k
                acc = acc + term
            ref = acc
        assert np.linalg.norm(dense - ref) / np.linalg.norm(ref) < 1e-9


def test_complex_generator():
    grid = build_grid(2, 2, 1.0, 0.0, -1.0, 1.0)
    D = build_generator(grid, 1.0).diffusion.toarray()
    psi = np.ones(grid.size, dtype=complex) / 4
    out = expm_apply(1j * 0.5 * D, 1.0, psi)
    np.testing.assert_allclose(out, scipy.linalg.expm(0.5j * D) @ psi, atol=1e-14)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 4.0), st.floats(0.0, 2.0))
def test_mass_and_semigroup(dt, split):
    grid = build_grid(3, 3, 1.0, 0.0, -1.5, 2.0)
    L = build_generator(grid, 0.5)
    p = vectorize(gaussian_density(grid, 4.0, 1.2, 0.3, 0.7))
    out = expm_apply(L, dt, p)
    assert abs(out.sum() - p.sum()) < 1e-9
    t1 = min(split, dt)
    two_step = expm_apply(L, dt - t1, expm_apply(L, t1, p))
    np.testing.assert_allclose(two_step, out, rtol=0, atol=1e-8)


def test_drift_preserves_velocity_slices():
    grid = build_grid(3, 3, 1.0, 0.0, -1.5, 2.0)
    p = vectorize(gaussian_density(grid, 4.0, 1.2, 0.3, 0.7))
    out = expm_apply(build_drift_generator(grid), 2.0, p)
    slices = lambda a: a.reshape((grid.N_x, grid.N_v), order="F").sum(axis=0)
    np.testing.assert_allclose(slices(out), slices(p), rtol=0, atol=1e-9)


def test_spectral_diffusion():
    grid = build_grid(2, 2, 1.0, 0.0, -1.0, 1.0)
    p = vectorize(gaussian_density(grid, 1.5, 0.8, 0.2, 0.5))
    np.testing.assert_allclose(classical_diffusion_spectral(p, grid, 0.0, 1.0), p, rtol=0, atol=1e-12)
    u = np.full(grid.size, 1 / grid.size)
    np.testing.assert_allclose(classical_diffusion_spectral(u, grid, 0.7, 1.0), u, rtol=0, atol=1e-15)
    D = build_generator(grid, 1.0).diffusion
    oracle = expm_apply(0.6 * D, 1.1, p, method="dense")
    np.testing.assert_allclose(classical_diffusion_spectral(p, grid, 0.6, 1.1), oracle, rtol=0, atol=1e-9)


def test_spectral_diffusion_damps(rng):
    grid = build_grid(3, 4, 1.0, 0.0, -1.0, 1.0)
    p = rng.random(grid.size)
    p /= p.sum()
    out = classical_diffusion_spectral(p, grid, 0.3, 0.5)
    coeff = lambda a: np.abs(np.fft.fft(a.reshape((grid.N_x, grid.N_v), order="F"), axis=1, norm="ortho"))
    assert np.all(coeff(out) <= coeff(p) + 1e-14)
