"""Position-velocity grid, initial densities and the density <-> amplitude encoding.

Layout convention used throughout the package: a density matrix ``P`` has shape
``(N_x, N_v)`` (rows = position, columns = velocity) and is flattened in
column-major order, so grid cell ``(i, j)`` sits at flat index ``j * N_x + i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidArgumentError, NormalizationError, NumericalConsistencyError

MASS_TOL = 1e-12


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Uniform periodic grid over position (``n_x`` qubits) and velocity (``n_v`` qubits)."""

    n_x: int
    n_v: int
    delta_x: float
    delta_v: float
    x0: float = 0.0
    v_min: float = 0.0

    def __post_init__(self):
        if self.n_x < 1 or self.n_v < 1:
            raise InvalidArgumentError(f"qubit counts must be >= 1, got n_x={self.n_x}, n_v={self.n_v}")
        if not (self.delta_x > 0 and self.delta_v > 0):
            raise InvalidArgumentError("grid spacings must be positive")
        if not (np.isfinite(self.x0) and np.isfinite(self.v_min)):
            raise InvalidArgumentError("grid origin must be finite")

    @property
    def N_x(self) -> int:
        return 1 << self.n_x

    @property
    def N_v(self) -> int:
        return 1 << self.n_v

    @property
    def size(self) -> int:
        return self.N_x * self.N_v

    @property
    def n_qubits(self) -> int:
        return self.n_x + self.n_v

    @property
    def x_axis(self) -> np.ndarray:
        return self.x0 + self.delta_x * np.arange(self.N_x)

    @property
    def v_axis(self) -> np.ndarray:
        return self.v_min + self.delta_v * np.arange(self.N_v)

    @property
    def v_max(self) -> float:
        return self.v_min + self.delta_v * (self.N_v - 1)


def build_grid(n_x: int, n_v: int, delta_x: float, x0: float, v_min: float, v_max: float) -> PhaseSpaceGrid:
    """Build a grid whose velocity axis includes both ``v_min`` and ``v_max``."""
    if n_x < 1 or n_v < 1:
        raise InvalidArgumentError("qubit counts must be >= 1")
    if not delta_x > 0:
        raise InvalidArgumentError(f"delta_x must be positive, got {delta_x}")
    if not v_max > v_min:
        raise InvalidArgumentError(f"need v_max > v_min, got [{v_min}, {v_max}]")
    N_v = 1 << n_v
    return PhaseSpaceGrid(n_x, n_v, float(delta_x), (v_max - v_min) / (N_v - 1), float(x0), float(v_min))


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Probability masses on the grid, shape ``(N_x, N_v)``.

    Construction checks nonnegativity and unit total mass. Results of the
    classical solver may carry small negative cells from the central-difference
    stencil; wrap those with :meth:`from_solution`, which only checks shape and
    finiteness.
    """

    values: np.ndarray
    grid: PhaseSpaceGrid
    checked: bool = field(default=True, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        shape = (self.grid.N_x, self.grid.N_v)
        if values.shape != shape:
            raise InvalidArgumentError(f"density shape {values.shape} does not match grid {shape}")
        if not np.all(np.isfinite(values)):
            raise NumericalConsistencyError("density contains non-finite entries")
        if self.checked:
            if np.any(values < 0):
                raise DomainError("density has negative entries")
            total = values.sum()
            if abs(total - 1.0) > MASS_TOL:
                raise NormalizationError(f"total mass {total!r} differs from 1")
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def from_solution(cls, values: np.ndarray, grid: PhaseSpaceGrid) -> DensityGrid:
        return cls(values, grid, checked=False)

    @property
    def total_mass(self) -> float:
        return float(self.values.sum())


@dataclass(frozen=True, eq=False)
class AmplitudeState:
    """Complex amplitudes indexed like :func:`vectorize` output."""

    amplitudes: np.ndarray
    grid: PhaseSpaceGrid

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.size,):
            raise InvalidArgumentError(f"expected {self.grid.size} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``(N_x, N_v)``."""
        return self.amplitudes.reshape((self.grid.N_x, self.grid.N_v), order="F")


def gaussian_density(grid: PhaseSpaceGrid, mu_x: float, sigma_x: float, mu_v: float, sigma_v: float) -> DensityGrid:
    """Separable discrete Gaussian, each 1-D factor normalized to unit mass."""
    if not (sigma_x > 0 and sigma_v > 0):
        raise InvalidArgumentError("standard deviations must be positive")
    px = np.exp(-((grid.x_axis - mu_x) ** 2) / (2.0 * sigma_x**2))
    pv = np.exp(-((grid.v_axis - mu_v) ** 2) / (2.0 * sigma_v**2))
    if px.sum() == 0 or pv.sum() == 0:
        raise InvalidArgumentError("Gaussian underflows on every grid point; mean is too far from the grid")
    px /= px.sum()
    pv /= pv.sum()
    P = np.outer(px, pv)
    # outer product of two unit-mass vectors can miss 1 by a few ulps
    P /= P.sum()
    return DensityGrid(P, grid)


def vectorize(P: DensityGrid) -> np.ndarray:
    return P.values.reshape(-1, order="F").copy()


def devectorize(p: np.ndarray, grid: PhaseSpaceGrid, checked: bool = True) -> DensityGrid:
    p = np.asarray(p, dtype=float)
    if p.shape != (grid.size,):
        raise InvalidArgumentError(f"mass vector of length {p.size} does not match grid size {grid.size}")
    return DensityGrid(p.reshape((grid.N_x, grid.N_v), order="F"), grid, checked=checked)


def amplitude_encode(p: np.ndarray, grid: PhaseSpaceGrid, tol: float = 1e-9) -> AmplitudeState:
    """Encode a mass vector as amplitudes ``sqrt(p)``."""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise DomainError("cannot encode negative probability mass")
    total = p.sum()
    if abs(total - 1.0) > tol:
        raise NormalizationError(f"mass vector sums to {total!r}, expected 1")
    return AmplitudeState(np.sqrt(p), grid)


def decode_density(psi: AmplitudeState, tol: float = 1e-6) -> DensityGrid:
    """Density ``|psi|^2`` as a :class:`DensityGrid`."""
    if abs(psi.norm - 1.0) > tol:
        raise NumericalConsistencyError(f"state norm {psi.norm!r} deviates from 1")
    p = np.abs(psi.amplitudes) ** 2
    return devectorize(p, psi.grid, checked=False)
