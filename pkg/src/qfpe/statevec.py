"""Deterministic statevector simulator for :mod:`qfpe.circuit` circuits.

Amplitudes are stored little-endian: qubit ``t`` is bit ``t`` of the basis
index. Kernels act on a ``(2**n, batch)`` array so the same code path serves
single states and the dense-matrix oracle.
"""
from __future__ import annotations

from functools import lru_cache
from pathlib import Path

import numpy as np

from .circuit import (
    ControlledDiagonalPhase,
    ControlledPhase,
    DiagonalPhase,
    Hadamard,
    Phase,
    QuantumCircuit,
    Swap,
    prediction_circuit,
)
from .errors import InvalidArgumentError, NormalizationError, NumericalConsistencyError, SimulatorCapError
from .grid import AmplitudeState, PhaseSpaceGrid

NORM_TOL = 1e-12
MATRIX_QUBIT_CAP = 10
_SQRT1_2 = 1.0 / np.sqrt(2.0)


class SimState:
    """Mutable amplitude register owned by one caller at a time."""

    def __init__(self, amplitudes: np.ndarray, n_qubits: int):
        amps = np.array(amplitudes, dtype=complex)
        if amps.shape != (1 << n_qubits,):
            raise InvalidArgumentError(f"{n_qubits} qubits need {1 << n_qubits} amplitudes, got shape {amps.shape}")
        self.amplitudes = amps
        self.n_qubits = n_qubits

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> SimState:
        return SimState(self.amplitudes, self.n_qubits)


def _view(a: np.ndarray, n: int) -> np.ndarray:
    # axis 0 is the most significant qubit; trailing axis is the batch
    return a.reshape((2,) * n + (a.shape[-1],))


def _axis(n: int, q: int) -> int:
    return n - 1 - q


def _index(n: int, fixed: dict[int, int]) -> tuple:
    idx = [slice(None)] * (n + 1)
    for q, bit in fixed.items():
        idx[_axis(n, q)] = bit
    return tuple(idx)


@lru_cache(maxsize=64)
def _subset_index(n: int, targets: tuple[int, ...]) -> np.ndarray:
    basis = np.arange(1 << n)
    out = np.zeros(1 << n, dtype=np.intp)
    for s, q in enumerate(targets):
        out |= ((basis >> q) & 1) << s
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def _bit_mask(n: int, q: int) -> np.ndarray:
    mask = ((np.arange(1 << n) >> q) & 1).astype(bool)
    mask.setflags(write=False)
    return mask


def _apply(a: np.ndarray, n: int, gate) -> None:
    """Apply ``gate`` in place to the ``(2**n, batch)`` array ``a``."""
    if any(q < 0 or q >= n for q in gate.qubits):
        raise InvalidArgumentError(f"{gate!r} addresses a qubit outside [0, {n})")
    v = _view(a, n)
    if isinstance(gate, Hadamard):
        i0, i1 = _index(n, {gate.target: 0}), _index(n, {gate.target: 1})
        a0 = v[i0].copy()
        a1 = v[i1]
        v[i0] = (a0 + a1) * _SQRT1_2
        v[i1] = (a0 - a1) * _SQRT1_2
    elif isinstance(gate, Phase):
        v[_index(n, {gate.target: 1})] *= np.exp(1j * gate.theta)
    elif isinstance(gate, ControlledPhase):
        v[_index(n, {gate.control: 1, gate.target: 1})] *= np.exp(1j * gate.theta)
    elif isinstance(gate, Swap):
        i01, i10 = _index(n, {gate.a: 0, gate.b: 1}), _index(n, {gate.a: 1, gate.b: 0})
        tmp = v[i01].copy()
        v[i01] = v[i10]
        v[i10] = tmp
    elif isinstance(gate, DiagonalPhase):
        table = np.exp(1j * np.asarray(gate.phases))
        a *= table[_subset_index(n, gate.targets)][:, None]
    elif isinstance(gate, ControlledDiagonalPhase):
        table = np.exp(1j * np.asarray(gate.phases))
        factors = table[_subset_index(n, gate.targets)]
        factors = np.where(_bit_mask(n, gate.control), factors, 1.0)
        a *= factors[:, None]
    else:
        raise InvalidArgumentError(f"unsupported gate {gate!r}")


def apply_gate(state: SimState, gate) -> SimState:
    """Apply one gate in place and return the same state."""
    _apply(state.amplitudes.reshape(-1, 1), state.n_qubits, gate)
    return state


def _check_norm(norm: float, where: str) -> None:
    if abs(norm - 1.0) > NORM_TOL:
        raise NumericalConsistencyError(f"norm drifted to {norm!r} {where}")


def run(state: SimState, circuit: QuantumCircuit, check_each_gate: bool = False) -> SimState:
    """Return a new state with ``circuit`` applied; the input is untouched."""
    if circuit.n_qubits != state.n_qubits:
        raise InvalidArgumentError(f"circuit has {circuit.n_qubits} qubits, state has {state.n_qubits}")
    out = state.copy()
    start = out.norm
    a = out.amplitudes.reshape(-1, 1)
    for g in circuit.gates:
        _apply(a, out.n_qubits, g)
        if check_each_gate:
            _check_norm(np.linalg.norm(a) / start, f"after {g!r}")
    _check_norm(out.norm / start, "after circuit")
    return out


def circuit_to_matrix(circuit: QuantumCircuit) -> np.ndarray:
    """Dense unitary whose column ``b`` is the circuit applied to ``|b>``."""
    n = circuit.n_qubits
    if n > MATRIX_QUBIT_CAP:
        raise SimulatorCapError(f"dense matrix limited to {MATRIX_QUBIT_CAP} qubits, circuit has {n}")
    U = np.eye(1 << n, dtype=complex)
    for g in circuit.gates:
        _apply(U, n, g)
    return U


def load_state(psi: AmplitudeState, tol: float = 1e-10) -> SimState:
    if abs(psi.norm - 1.0) > tol:
        raise NormalizationError(f"state norm {psi.norm!r} is not 1")
    return SimState(psi.amplitudes, psi.grid.n_qubits)


def extract(state: SimState, grid: PhaseSpaceGrid) -> AmplitudeState:
    return AmplitudeState(state.amplitudes, grid)


def predict(psi: AmplitudeState, grid: PhaseSpaceGrid, dt: float, q: float) -> AmplitudeState:
    """One quantum prediction step ``U_x U_v psi``."""
    return extract(run(load_state(psi), prediction_circuit(grid, dt, q)), grid)


def save_amplitudes(path, amplitudes: np.ndarray) -> None:
    """Binary dump: little-endian float64 (re, im) pairs in index order."""
    a = np.asarray(amplitudes, dtype=complex)
    pairs = np.empty(2 * a.size, dtype="<f8")
    pairs[0::2] = a.real
    pairs[1::2] = a.imag
    Path(path).write_bytes(pairs.tobytes())


def load_amplitudes(path) -> np.ndarray:
    pairs = np.frombuffer(Path(path).read_bytes(), dtype="<f8")
    if pairs.size % 2:
        raise InvalidArgumentError("amplitude dump has an odd number of float64 values")
    return pairs[0::2] + 1j * pairs[1::2]
