"""Circulant finite-difference operators on periodic grids and their Fourier spectra.

The DFT matrix uses the positive-sign convention common in quantum computing,
``Q[m, n] = exp(2*pi*i*m*n/N) / sqrt(N)``; with it ``Q^H C Q`` is diagonal for
every circulant ``C`` and mode ``k`` is indexed 0..N-1 without fftshift.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

KINDS = ("shift_minus", "shift_plus", "d_x", "d_vv")


@dataclass(frozen=True, eq=False)
class CirculantOperator:
    matrix: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown operator kind {self.kind!r}")
        m = np.array(self.matrix, copy=True)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def N(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def first_column(self) -> np.ndarray:
        return self.matrix[:, 0].copy()


def _check_size(N: int) -> None:
    if N < 2:
        raise InvalidArgumentError(f"operator size must be >= 2, got {N}")


def _check_spacing(h: float) -> None:
    if not h > 0:
        raise InvalidArgumentError(f"spacing must be positive, got {h}")


def shift_matrix(N: int, direction: str) -> CirculantOperator:
    """Cyclic shift. ``minus`` has ones on the superdiagonal and at ``(N-1, 0)``,
    ``plus`` on the subdiagonal and at ``(0, N-1)``."""
    _check_size(N)
    rows = np.arange(N)
    if direction == "minus":
        cols = (rows + 1) % N
    elif direction == "plus":
        cols = (rows - 1) % N
    else:
        raise InvalidArgumentError(f"direction must be 'plus' or 'minus', got {direction!r}")
    S = np.zeros((N, N))
    S[rows, cols] = 1.0
    return CirculantOperator(S, f"shift_{direction}")


def dx_matrix(N: int, delta_x: float) -> CirculantOperator:
    """Central first difference ``(S_- - S_+) / (2 dx)``."""
    _check_size(N)
    _check_spacing(delta_x)
    D = (shift_matrix(N, "minus").matrix - shift_matrix(N, "plus").matrix) / (2.0 * delta_x)
    return CirculantOperator(D, "d_x")


def dvv_matrix(N: int, delta_v: float) -> CirculantOperator:
    """Second difference ``(S_+ + S_- - 2I) / dv^2``."""
    _check_size(N)
    _check_spacing(delta_v)
    D = (shift_matrix(N, "plus").matrix + shift_matrix(N, "minus").matrix - 2.0 * np.eye(N)) / delta_v**2
    return CirculantOperator(D, "d_vv")


def dft_matrix(N: int) -> np.ndarray:
    _check_size(N)
    k = np.arange(N)
    return np.exp(2j * np.pi * np.outer(k, k) / N) / np.sqrt(N)


def shift_eigenvalues(N: int, direction: str) -> np.ndarray:
    _check_size(N)
    sign = {"minus": 1.0, "plus": -1.0}.get(direction)
    if sign is None:
        raise InvalidArgumentError(f"direction must be 'plus' or 'minus', got {direction!r}")
    return np.exp(sign * 2j * np.pi * np.arange(N) / N)


def dx_eigenvalues(N: int, delta_x: float) -> np.ndarray:
    """``(i / dx) sin(2 pi k / N)`` for ``k = 0..N-1``."""
    _check_size(N)
    _check_spacing(delta_x)
    return 1j * np.sin(2.0 * np.pi * np.arange(N) / N) / delta_x


def dvv_eigenvalues(N: int, delta_v: float) -> np.ndarray:
    """``-(4 / dv^2) sin^2(pi m / N)`` for ``m = 0..N-1``; real and non-positive."""
    _check_size(N)
    _check_spacing(delta_v)
    return -4.0 / delta_v**2 * np.sin(np.pi * np.arange(N) / N) ** 2


def diagonalization_error(op, eigenvalues: np.ndarray) -> float:
    """Max-norm distance between ``Q^H op Q`` and ``diag(eigenvalues)``."""
    A = np.asarray(op)
    Q = dft_matrix(A.shape[0])
    return float(np.max(np.abs(Q.conj().T @ A @ Q - np.diag(eigenvalues))))
