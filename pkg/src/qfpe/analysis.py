"""Comparison metrics on joint densities and diagnostics of the amplitude-space diffusion error."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .classical import velocity_fourier
from .errors import DomainError, InvalidArgumentError
from .grid import AmplitudeState, DensityGrid, PhaseSpaceGrid
from .spectral import dvv_eigenvalues, dvv_matrix

REAL_TOL = 1e-10


@dataclass(frozen=True)
class MetricsReport:
    l2_error: float
    total_variation: float
    mean_error: float
    cov_error: float
    label_a: str = "a"
    label_b: str = "b"

    def as_dict(self) -> dict:
        return {
            "label_a": self.label_a,
            "label_b": self.label_b,
            "l2_error": self.l2_error,
            "total_variation": self.total_variation,
            "mean_error": self.mean_error,
            "cov_error": self.cov_error,
        }


def moments(P: DensityGrid) -> tuple[np.ndarray, np.ndarray]:
    """Mean ``(E[x], E[v])`` and 2x2 covariance of a joint mass array, using grid coordinates."""
    W = P.values
    X, V = np.meshgrid(P.grid.x_axis, P.grid.v_axis, indexing="ij")
    total = W.sum()
    mean = np.array([(W * X).sum(), (W * V).sum()]) / total
    dX, dV = X - mean[0], V - mean[1]
    cxv = (W * dX * dV).sum() / total
    cov = np.array([[(W * dX * dX).sum() / total, cxv], [cxv, (W * dV * dV).sum() / total]])
    return mean, cov


def compare(P_a: DensityGrid, P_b: DensityGrid, label_a: str = "a", label_b: str = "b") -> MetricsReport:
    """Frobenius L2, total variation, Euclidean mean error and Frobenius covariance error."""
    if P_a.grid != P_b.grid:
        raise InvalidArgumentError("densities live on different grids")
    diff = P_a.values - P_b.values
    mean_a, cov_a = moments(P_a)
    mean_b, cov_b = moments(P_b)
    return MetricsReport(
        l2_error=float(np.linalg.norm(diff)),
        total_variation=float(0.5 * np.abs(diff).sum()),
        mean_error=float(np.linalg.norm(mean_a - mean_b)),
        cov_error=float(np.linalg.norm(cov_a - cov_b)),
        label_a=label_a,
        label_b=label_b,
    )


def marginals(P: DensityGrid) -> tuple[np.ndarray, np.ndarray]:
    return P.values.sum(axis=1), P.values.sum(axis=0)


@dataclass(frozen=True, eq=False)
class ResidualField:
    values: np.ndarray
    grid: PhaseSpaceGrid


def _real_matrix(psi: AmplitudeState) -> np.ndarray:
    M = psi.as_matrix()
    if np.max(np.abs(M.imag), initial=0.0) > REAL_TOL:
        raise DomainError("diffusion residual is derived for real-valued amplitudes")
    return M.real


def diffusion_residual(psi: AmplitudeState, grid: PhaseSpaceGrid, nu_v: float, stencil: str = "central") -> ResidualField:
    """Pointwise density-rate gap ``2 nu_v (D_v psi)^2`` along the periodic velocity axis.

    ``stencil="central"`` uses the central difference. ``"one_sided"`` averages
    the squared forward and backward differences, which is the exact grid
    counterpart of ``D_vv(psi^2) - 2 psi D_vv psi``.
    """
    M = _real_matrix(psi)
    up = np.roll(M, -1, axis=1)
    down = np.roll(M, 1, axis=1)
    h = grid.delta_v
    if stencil == "central":
        sq = ((up - down) / (2.0 * h)) ** 2
    elif stencil == "one_sided":
        sq = 0.5 * (((up - M) / h) ** 2 + ((M - down) / h) ** 2)
    else:
        raise InvalidArgumentError(f"unknown stencil {stencil!r}")
    return ResidualField(2.0 * nu_v * sq, grid)


@dataclass(frozen=True, eq=False)
class RateCheck:
    observed: np.ndarray
    predicted: np.ndarray
    max_abs_gap: float
    central_gap: float
    delta: float


def residual_rate_check(psi: AmplitudeState, grid: PhaseSpaceGrid, nu_v: float, delta: float,
                        stencil: str = "one_sided") -> RateCheck:
    """Finite-time measurement of the density-rate discrepancy.

    Evolves the real amplitude with linear diffusion ``exp(delta nu_v D_vv)``
    and the density with the same operator, and returns
    ``(p(delta) - psi(delta)^2) / delta`` next to the predicted residual field.
    ``central_gap`` is the gap against the central-difference residual, which
    carries an extra O(dv^2) spatial error and does not vanish with ``delta``.
    """
    if not delta > 0:
        raise InvalidArgumentError("delta must be positive")
    if nu_v > 0 and delta > 1e-3 * grid.delta_v**2 / nu_v:
        raise InvalidArgumentError(f"delta={delta} too large; need <= 1e-3 dv^2 / nu_v")
    M = _real_matrix(psi)
    E = scipy.linalg.expm(delta * nu_v * dvv_matrix(grid.N_v, grid.delta_v).matrix)
    psi_t = M @ E.T
    p_t = (M * M) @ E.T
    observed = (p_t - psi_t * psi_t) / delta
    predicted = diffusion_residual(psi, grid, nu_v, stencil).values
    central = diffusion_residual(psi, grid, nu_v, "central").values
    return RateCheck(
        observed=observed,
        predicted=predicted,
        max_abs_gap=float(np.max(np.abs(observed - predicted))),
        central_gap=float(np.max(np.abs(observed - central))),
        delta=delta,
    )


def observed_orders(psi: AmplitudeState, grid: PhaseSpaceGrid, nu_v: float, delta0: float,
                    halvings: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Gaps at ``delta0 / 2**h`` and the log2 ratios of successive gaps."""
    gaps = np.array([residual_rate_check(psi, grid, nu_v, delta0 / 2**h).max_abs_gap for h in range(halvings + 1)])
    return gaps, np.log2(gaps[:-1] / gaps[1:])


class SpectralRow(NamedTuple):
    m: int
    mu: float
    damping: float
    phase_half: complex
    phase_full: complex
    abs_p_hat: float
    abs_psi_hat: float


def spectral_comparison(p: np.ndarray, psi: AmplitudeState, grid: PhaseSpaceGrid, nu_v: float, q: float,
                        dt: float) -> list[SpectralRow]:
    """Per velocity mode: classical damping ``exp(dt nu mu)`` vs. phase factors.

    Both phase conventions are tabulated: ``exp(i q dt mu / 2)`` from the
    error-analysis sketch and ``exp(i q dt mu)`` used by the circuit. Mode
    magnitudes are l2 norms over the position axis.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (grid.size,):
        raise InvalidArgumentError("mass vector does not match grid")
    mu = dvv_eigenvalues(grid.N_v, grid.delta_v)
    p_hat = np.linalg.norm(velocity_fourier(p.reshape((grid.N_x, grid.N_v), order="F")), axis=0)
    psi_hat = np.linalg.norm(velocity_fourier(psi.as_matrix()), axis=0)
    damping = np.exp(dt * nu_v * mu)
    half = np.exp(0.5j * q * dt * mu)
    full = np.exp(1j * q * dt * mu)
    return [
        SpectralRow(m, float(mu[m]), float(damping[m]), complex(half[m]), complex(full[m]),
                    float(p_hat[m]), float(psi_hat[m]))
        for m in range(grid.N_v)
    ]
