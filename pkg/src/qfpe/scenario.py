"""Scenario configuration and the classical-vs-quantum prediction pipeline."""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis import MetricsReport, SpectralRow, compare, marginals, spectral_comparison
from .circuit import GateCountReport, gate_count_report, prediction_circuit
from .classical import build_generator, expm_apply
from .errors import InvalidArgumentError, NumericalConsistencyError, SimulatorCapError
from .grid import (
    AmplitudeState,
    DensityGrid,
    PhaseSpaceGrid,
    amplitude_encode,
    build_grid,
    decode_density,
    devectorize,
    gaussian_density,
    vectorize,
)
from .statevec import load_state, run

log = logging.getLogger(__name__)

QUBIT_CAP = 24
CLASSICAL_MASS_TOL = 1e-8

MARGINAL_HEADER = "coordinate,mass"
SPECTRAL_HEADER = "m,mu,damping,phase_half_re,phase_half_im,phase_full_re,phase_full_im,abs_p_hat,abs_psi_hat"


@dataclass
class ScenarioConfig:
    """Scenario parameters. ``None`` fields are resolved by :meth:`resolved`.

    Default widths: ``sigma_x = 4 dx``; ``sigma_v`` is the matched-spreading
    width ``q sqrt(T / (2 nu_v))`` (``T = steps * dt``) at which the dispersive
    spread of ``|psi|^2`` equals the diffusive variance growth ``2 nu_v T``,
    falling back to ``3 dv`` when that is undefined.
    """

    n_x: int = 6
    n_v: int = 6
    delta_x: float = 1.0
    x0: float = 0.0
    v_min: float = -3.75
    v_max: float = 3.75
    dt: float = 1.0
    q: float = 0.5
    nu_v: Optional[float] = None
    mu_x: Optional[float] = None
    sigma_x: Optional[float] = None
    mu_v: float = 0.0
    sigma_v: Optional[float] = None
    steps: int = 1
    output: str = "qfpe_out"
    reencode_each_step: bool = False

    @property
    def grid(self) -> PhaseSpaceGrid:
        return build_grid(self.n_x, self.n_v, self.delta_x, self.x0, self.v_min, self.v_max)

    def resolved(self) -> ScenarioConfig:
        """Copy with defaults filled in and every field validated."""
        if self.n_x < 1 or self.n_v < 1:
            raise InvalidArgumentError("qubit counts must be >= 1")
        if self.n_x + self.n_v > QUBIT_CAP:
            raise SimulatorCapError(f"n_x + n_v = {self.n_x + self.n_v} exceeds the simulator cap of {QUBIT_CAP}")
        if self.steps < 1:
            raise InvalidArgumentError("steps must be >= 1")
        if not self.dt >= 0:
            raise InvalidArgumentError("dt must be >= 0")
        grid = self.grid
        nu_v = self.q if self.nu_v is None else self.nu_v
        if not nu_v >= 0:
            raise InvalidArgumentError("nu_v must be >= 0")
        T = self.steps * self.dt
        sigma_v = self.sigma_v
        if sigma_v is None:
            sigma_v = abs(self.q) * math.sqrt(T / (2.0 * nu_v)) if (self.q != 0 and nu_v > 0 and T > 0) else 0.0
            if sigma_v <= 0:
                sigma_v = 3.0 * grid.delta_v
        out = dataclasses.replace(
            self,
            nu_v=float(nu_v),
            mu_x=self.x0 + self.delta_x * grid.N_x / 2 if self.mu_x is None else self.mu_x,
            sigma_x=4.0 * self.delta_x if self.sigma_x is None else self.sigma_x,
            sigma_v=float(sigma_v),
        )
        if not (out.sigma_x > 0 and out.sigma_v > 0):
            raise InvalidArgumentError("standard deviations must be positive")
        return out

    def as_lines(self) -> list[str]:
        return [f"{f.name}={getattr(self, f.name)}" for f in dataclasses.fields(self)]


PRESETS = {
    "scenario1": dict(mu_v=-1.0),
    "scenario2": dict(mu_v=2.0),
}


def preset(name: str, **overrides) -> ScenarioConfig:
    if name not in PRESETS:
        raise InvalidArgumentError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return ScenarioConfig(**{**PRESETS[name], **overrides})


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    initial: DensityGrid
    classical: DensityGrid
    quantum: DensityGrid
    final_state: AmplitudeState
    metrics: MetricsReport
    spectral: list[SpectralRow]
    gates: GateCountReport
    step_norms: list[float] = field(default_factory=list)


def run_scenario(config: ScenarioConfig, classical_method: str = "auto") -> ScenarioResult:
    cfg = config.resolved()
    grid = cfg.grid
    initial = gaussian_density(grid, cfg.mu_x, cfg.sigma_x, cfg.mu_v, cfg.sigma_v)
    p0 = vectorize(initial)

    p_classical = expm_apply(build_generator(grid, cfg.nu_v), cfg.steps * cfg.dt, p0, method=classical_method)
    mass = p_classical.sum()
    if abs(mass - 1.0) > CLASSICAL_MASS_TOL:
        raise NumericalConsistencyError(f"classical prediction lost mass: total {mass!r}")
    classical = devectorize(p_classical, grid, checked=False)

    circuit = prediction_circuit(grid, cfg.dt, cfg.q)
    psi = amplitude_encode(p0, grid)
    state = load_state(psi)
    norms = []
    for _ in range(cfg.steps):
        state = run(state, circuit)
        norms.append(state.norm)
        if cfg.reencode_each_step:
            state.amplitudes = np.sqrt(np.abs(state.amplitudes) ** 2).astype(complex)
    final = AmplitudeState(state.amplitudes, grid)
    quantum = decode_density(final)

    log.info("scenario finished: %d steps on %d amplitudes", cfg.steps, grid.size)
    return ScenarioResult(
        config=cfg,
        initial=initial,
        classical=classical,
        quantum=quantum,
        final_state=final,
        metrics=compare(classical, quantum, "classical", "quantum"),
        spectral=spectral_comparison(p0, psi, grid, cfg.nu_v, cfg.q, cfg.dt),
        gates=gate_count_report(circuit),
        step_norms=norms,
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_marginal(path: Path, coords: np.ndarray, mass: np.ndarray) -> None:
    rows = [MARGINAL_HEADER] + [f"{_fmt(c)},{_fmt(m)}" for c, m in zip(coords, mass)]
    path.write_text("\n".join(rows) + "\n")


def write_artifacts(result: ScenarioResult, outdir) -> list[Path]:
    """Write marginal CSVs, metrics, spectral table, gate counts and the resolved config."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    grid = result.config.grid
    written = []
    for label, P in (("initial", result.initial), ("classical", result.classical), ("quantum", result.quantum)):
        px, pv = marginals(P)
        for axis, coords, mass in (("x", grid.x_axis, px), ("v", grid.v_axis, pv)):
            path = out / f"marginal_{axis}_{label}.csv"
            _write_marginal(path, coords, mass)
            written.append(path)

    metrics = out / "metrics.txt"
    metrics.write_text("\n".join(f"{k}={v if isinstance(v, str) else _fmt(v)}"
                                 for k, v in result.metrics.as_dict().items()) + "\n")
    spectral = out / "spectral.csv"
    rows = [SPECTRAL_HEADER] + [
        ",".join([str(r.m), _fmt(r.mu), _fmt(r.damping), _fmt(r.phase_half.real), _fmt(r.phase_half.imag),
                  _fmt(r.phase_full.real), _fmt(r.phase_full.imag), _fmt(r.abs_p_hat), _fmt(r.abs_psi_hat)])
        for r in result.spectral
    ]
    spectral.write_text("\n".join(rows) + "\n")
    gates = out / "gatecount.txt"
    gates.write_text("\n".join(result.gates.as_lines()) + "\n")
    config = out / "config.txt"
    config.write_text("\n".join(result.config.as_lines()) + "\n")
    return written + [metrics, spectral, gates, config]
