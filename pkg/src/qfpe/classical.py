"""Discrete Fokker-Planck generator and the exact classical prediction ``exp(dt L) p``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .errors import InvalidArgumentError, NumericalConsistencyError
from .grid import PhaseSpaceGrid
from .spectral import dvv_eigenvalues, dvv_matrix, dx_matrix

# above this dimension expm_apply switches from the dense Pade path to expm_multiply
DENSE_LIMIT = 1024


@dataclass(frozen=True, eq=False)
class Generator:
    """Sparse generator ``L = -diag(v) (x) D_x + nu_v D_vv (x) I``.

    The Kronecker factor order (velocity outer, position inner) matches the
    column-major flattening ``idx = j * N_x + i``.
    """

    drift: sp.csr_matrix
    diffusion: sp.csr_matrix
    nu_v: float
    grid: PhaseSpaceGrid

    @property
    def matrix(self) -> sp.csr_matrix:
        return (self.drift + self.nu_v * self.diffusion).tocsr()

    @property
    def dim(self) -> int:
        return self.grid.size

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def build_generator(grid: PhaseSpaceGrid, nu_v: float) -> Generator:
    if not (np.isfinite(nu_v) and nu_v >= 0):
        raise InvalidArgumentError(f"nu_v must be finite and >= 0, got {nu_v}")
    Dx = sp.csr_matrix(dx_matrix(grid.N_x, grid.delta_x).matrix)
    Dvv = sp.csr_matrix(dvv_matrix(grid.N_v, grid.delta_v).matrix)
    drift = -sp.kron(sp.diags(grid.v_axis), Dx, format="csr")
    diffusion = sp.kron(Dvv, sp.identity(grid.N_x), format="csr")
    return Generator(drift, diffusion, float(nu_v), grid)


def build_drift_generator(grid: PhaseSpaceGrid) -> Generator:
    return build_generator(grid, 0.0)


def _as_operator(L):
    if isinstance(L, Generator):
        return L.matrix
    if sp.issparse(L):
        return L.tocsr()
    return np.asarray(L)


def expm_apply(L, dt: float, p: np.ndarray, method: str = "auto") -> np.ndarray:
    """Return ``exp(dt * L) @ p``.

    ``L`` may be a :class:`Generator`, a dense array or a scipy sparse matrix,
    real or complex. ``method`` is ``"dense"`` (scaling and squaring with a
    Pade approximant on the full matrix), ``"action"`` (truncated Taylor action,
    never forms the exponential) or ``"auto"``.
    """
    A = _as_operator(L)
    p = np.asarray(p)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgumentError(f"generator must be square, got shape {A.shape}")
    if p.shape[0] != A.shape[0]:
        raise InvalidArgumentError(f"vector length {p.shape[0]} does not match generator dimension {A.shape[0]}")
    if not dt >= 0:
        raise InvalidArgumentError(f"dt must be >= 0, got {dt}")
    data = A.data if sp.issparse(A) else A
    if not (np.all(np.isfinite(data)) and np.all(np.isfinite(p))):
        raise NumericalConsistencyError("non-finite entries in generator or vector")
    if dt == 0:
        return p.copy()

    if method == "auto":
        method = "dense" if A.shape[0] <= DENSE_LIMIT else "action"
    if method == "dense":
        dense = A.toarray() if sp.issparse(A) else A
        return scipy.linalg.expm(dt * dense) @ p
    if method == "action":
        return expm_multiply(dt * (A if sp.issparse(A) else sp.csr_matrix(A)), p)
    raise InvalidArgumentError(f"unknown method {method!r}")


def classical_prediction(p: np.ndarray, grid: PhaseSpaceGrid, nu_v: float, dt: float, method: str = "auto") -> np.ndarray:
    return expm_apply(build_generator(grid, nu_v), dt, p, method=method)


def velocity_fourier(P: np.ndarray) -> np.ndarray:
    """Apply ``Q_v^H`` along the velocity axis of an ``(N_x, N_v)`` array."""
    # positive-sign Q means Q^H is numpy's forward FFT
    return np.fft.fft(P, axis=1, norm="ortho")


def velocity_fourier_inverse(P_hat: np.ndarray) -> np.ndarray:
    return np.fft.ifft(P_hat, axis=1, norm="ortho")


def classical_diffusion_spectral(p: np.ndarray, grid: PhaseSpaceGrid, nu_v: float, dt: float,
                                 imag_tol: float = 1e-8) -> np.ndarray:
    """Pure velocity diffusion ``exp(dt nu_v D_vv (x) I) p`` by damping Fourier modes."""
    p = np.asarray(p, dtype=float)
    if p.shape != (grid.size,):
        raise InvalidArgumentError(f"vector length {p.size} does not match grid size {grid.size}")
    P = p.reshape((grid.N_x, grid.N_v), order="F")
    damping = np.exp(dt * nu_v * dvv_eigenvalues(grid.N_v, grid.delta_v))
    out = velocity_fourier_inverse(velocity_fourier(P) * damping[None, :])
    residue = np.max(np.abs(out.imag)) if out.size else 0.0
    if residue > imag_tol:
        raise NumericalConsistencyError(f"imaginary residue {residue:.3e} after spectral diffusion")
    return out.real.reshape(-1, order="F")
