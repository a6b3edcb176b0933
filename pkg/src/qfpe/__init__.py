"""Quantum prediction step for the position-velocity Fokker-Planck equation.

Amplitude-encoded densities are propagated by a Fourier-diagonal drift circuit
and a Wick-rotated (unitary) velocity diffusion, and compared against the
exact classical solution ``exp(dt L) p``.
"""
from .analysis import MetricsReport, compare, diffusion_residual, marginals, residual_rate_check, spectral_comparison
from .circuit import (
    PhasePlan,
    QuantumCircuit,
    diffusion_circuit,
    drift_circuit,
    drift_phase_plan,
    gate_count_report,
    prediction_circuit,
    qft_circuit,
)
from .classical import Generator, build_drift_generator, build_generator, classical_diffusion_spectral, expm_apply
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
from .scenario import ScenarioConfig, preset, run_scenario
from .statevec import SimState, circuit_to_matrix, load_state, predict, run

__all__ = [
    "AmplitudeState", "DensityGrid", "Generator", "MetricsReport", "PhasePlan", "PhaseSpaceGrid",
    "QuantumCircuit", "ScenarioConfig", "SimState", "amplitude_encode", "build_drift_generator",
    "build_generator", "build_grid", "circuit_to_matrix", "classical_diffusion_spectral", "compare",
    "decode_density", "devectorize", "diffusion_circuit", "diffusion_residual", "drift_circuit",
    "drift_phase_plan", "expm_apply", "gate_count_report", "gaussian_density", "load_state", "marginals",
    "predict", "prediction_circuit", "preset", "qft_circuit", "residual_rate_check", "run", "run_scenario",
    "spectral_comparison", "vectorize",
]
