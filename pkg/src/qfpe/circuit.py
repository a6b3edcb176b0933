"""Gate-level circuit IR and the builders for QFT, drift, diffusion and the full prediction step.

Register map: qubits ``[0, n_x)`` hold the position index ``i`` and qubits
``[n_x, n_x + n_v)`` the velocity index ``j``, both little-endian (qubit
``t`` of a register carries weight ``2**t``). Basis state ``|idx>`` therefore
coincides with the flat grid index ``idx = j * N_x + i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InvalidArgumentError
from .grid import PhaseSpaceGrid
from .spectral import dvv_eigenvalues

TWO_PI = 2.0 * math.pi


def reduce_phase(theta):
    """Map angles into ``(-pi, pi]``; accepts scalars or arrays."""
    out = np.asarray(theta, dtype=float)
    out = out - TWO_PI * np.ceil((out - math.pi) / TWO_PI)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Hadamard:
    target: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class Phase:
    target: int
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", reduce_phase(self.theta))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class ControlledPhase:
    control: int
    target: int
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", reduce_phase(self.theta))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)


@dataclass(frozen=True)
class Swap:
    a: int
    b: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.a, self.b)


@dataclass(frozen=True)
class DiagonalPhase:
    """Multiplies basis states by ``exp(i * phases[s])`` where ``s`` is the
    little-endian integer formed by the bits of ``targets``."""

    targets: tuple[int, ...]
    phases: tuple[float, ...]

    def __post_init__(self):
        targets = tuple(int(q) for q in self.targets)
        phases = tuple(float(t) for t in reduce_phase(np.atleast_1d(np.asarray(self.phases, dtype=float))))
        if len(phases) != 1 << len(targets):
            raise InvalidArgumentError(f"phase table has {len(phases)} entries, need {1 << len(targets)}")
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "phases", phases)

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets


@dataclass(frozen=True)
class ControlledDiagonalPhase:
    control: int
    targets: tuple[int, ...]
    phases: tuple[float, ...]

    def __post_init__(self):
        inner = DiagonalPhase(self.targets, self.phases)
        object.__setattr__(self, "targets", inner.targets)
        object.__setattr__(self, "phases", inner.phases)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, *self.targets)


GateOp = Union[Hadamard, Phase, ControlledPhase, Swap, DiagonalPhase, ControlledDiagonalPhase]
GATE_TYPES = (Hadamard, Phase, ControlledPhase, Swap, DiagonalPhase, ControlledDiagonalPhase)


def inverse_gate(gate: GateOp) -> GateOp:
    if isinstance(gate, (Hadamard, Swap)):
        return gate
    if isinstance(gate, Phase):
        return Phase(gate.target, -gate.theta)
    if isinstance(gate, ControlledPhase):
        return ControlledPhase(gate.control, gate.target, -gate.theta)
    if isinstance(gate, DiagonalPhase):
        return DiagonalPhase(gate.targets, tuple(-t for t in gate.phases))
    if isinstance(gate, ControlledDiagonalPhase):
        return ControlledDiagonalPhase(gate.control, gate.targets, tuple(-t for t in gate.phases))
    raise TypeError(f"not a gate: {gate!r}")


@dataclass(frozen=True)
class QuantumCircuit:
    n_qubits: int
    gates: tuple[GateOp, ...] = field(default=())

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidArgumentError("circuit needs at least one qubit")
        gates = tuple(self.gates)
        for g in gates:
            if not isinstance(g, GATE_TYPES):
                raise InvalidArgumentError(f"unsupported gate {g!r}")
            qs = g.qubits
            if len(set(qs)) != len(qs):
                raise InvalidArgumentError(f"repeated qubit in {g!r}")
            if any(q < 0 or q >= self.n_qubits for q in qs):
                raise InvalidArgumentError(f"{g!r} addresses a qubit outside [0, {self.n_qubits})")
        object.__setattr__(self, "gates", gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: QuantumCircuit) -> QuantumCircuit:
        if other.n_qubits != self.n_qubits:
            raise InvalidArgumentError("cannot concatenate circuits of different width")
        return QuantumCircuit(self.n_qubits, self.gates + other.gates)

    def inverse(self) -> QuantumCircuit:
        return QuantumCircuit(self.n_qubits, tuple(inverse_gate(g) for g in reversed(self.gates)))


def _register(register: Iterable[int], n_qubits: int | None) -> tuple[tuple[int, ...], int]:
    reg = tuple(int(q) for q in register)
    if not reg:
        raise InvalidArgumentError("register must contain at least one qubit")
    n_total = max(reg) + 1 if n_qubits is None else n_qubits
    if len(set(reg)) != len(reg) or min(reg) < 0 or max(reg) >= n_total:
        raise InvalidArgumentError(f"register {reg} out of range for {n_total} qubits")
    return reg, n_total


def qft_circuit(register: Sequence[int], inverse: bool = False, n_qubits: int | None = None) -> QuantumCircuit:
    """QFT on ``register`` (``register[t]`` has weight ``2**t``) realizing the
    positive-sign DFT matrix, final bit-reversal swaps included."""
    reg, n_total = _register(register, n_qubits)
    n = len(reg)
    gates: list[GateOp] = []
    for t in reversed(range(n)):
        gates.append(Hadamard(reg[t]))
        for s in reversed(range(t)):
            gates.append(ControlledPhase(reg[s], reg[t], math.pi / (1 << (t - s))))
    for s in range(n // 2):
        gates.append(Swap(reg[s], reg[n - 1 - s]))
    circ = QuantumCircuit(n_total, tuple(gates))
    return circ.inverse() if inverse else circ


@dataclass(frozen=True, eq=False)
class PhasePlan:
    """Per-mode phase coefficients of the drift step.

    ``beta[k]`` is the phase per unit velocity for position mode ``k``;
    ``theta0[k] = beta[k] * v_min``; ``theta_r[r, k] = beta[k] * dv * 2**r``.
    """

    beta: np.ndarray
    theta0: np.ndarray
    theta_r: np.ndarray

    def phase(self, k, j):
        """Reassemble the total phase from the bits of ``j``."""
        j = np.asarray(j)
        total = self.theta0[k] + 0.0 * j
        for r in range(self.theta_r.shape[0]):
            total = total + ((j >> r) & 1) * self.theta_r[r, k]
        return total


def drift_phase_plan(grid: PhaseSpaceGrid, dt: float) -> PhasePlan:
    if not dt >= 0:
        raise InvalidArgumentError(f"dt must be >= 0, got {dt}")
    k = np.arange(grid.N_x)
    beta = -(dt / grid.delta_x) * np.sin(2.0 * np.pi * k / grid.N_x)
    theta0 = beta * grid.v_min
    theta_r = np.stack([beta * grid.delta_v * (1 << r) for r in range(grid.n_v)])
    for a in (beta, theta0, theta_r):
        a.setflags(write=False)
    return PhasePlan(beta, theta0, theta_r)


def position_register(grid: PhaseSpaceGrid) -> tuple[int, ...]:
    return tuple(range(grid.n_x))


def velocity_register(grid: PhaseSpaceGrid) -> tuple[int, ...]:
    return tuple(range(grid.n_x, grid.n_x + grid.n_v))


def drift_circuit(grid: PhaseSpaceGrid, dt: float) -> QuantumCircuit:
    """Inverse QFT on position, diagonal phases ``U_min`` and controlled ``U_r``, QFT back."""
    plan = drift_phase_plan(grid, dt)
    n = grid.n_qubits
    pos = position_register(grid)
    gates: list[GateOp] = [DiagonalPhase(pos, tuple(plan.theta0))]
    for r, q in enumerate(velocity_register(grid)):
        gates.append(ControlledDiagonalPhase(q, pos, tuple(plan.theta_r[r])))
    return qft_circuit(pos, inverse=True, n_qubits=n) + QuantumCircuit(n, tuple(gates)) + qft_circuit(pos, n_qubits=n)


def diffusion_phase_table(grid: PhaseSpaceGrid, q: float, dt: float) -> np.ndarray:
    """Angles ``q * dt * mu_m`` of the Wick-rotated diffusion step."""
    return q * dt * dvv_eigenvalues(grid.N_v, grid.delta_v)


def diffusion_circuit(grid: PhaseSpaceGrid, q: float, dt: float) -> QuantumCircuit:
    n = grid.n_qubits
    vel = velocity_register(grid)
    phases = DiagonalPhase(vel, tuple(diffusion_phase_table(grid, q, dt)))
    return qft_circuit(vel, inverse=True, n_qubits=n) + QuantumCircuit(n, (phases,)) + qft_circuit(vel, n_qubits=n)


def prediction_circuit(grid: PhaseSpaceGrid, dt: float, q: float) -> QuantumCircuit:
    """Diffusion first, then drift: the operator product ``U_x U_v``."""
    return diffusion_circuit(grid, q, dt) + drift_circuit(grid, dt)


GATE_NAMES = {
    Hadamard: "H",
    Phase: "P",
    ControlledPhase: "CP",
    Swap: "SWAP",
    DiagonalPhase: "DIAG",
    ControlledDiagonalPhase: "CDIAG",
}


@dataclass(frozen=True)
class GateCountReport:
    """Gate counts per variant plus two cost figures.

    ``model_cost`` charges a diagonal block on ``n`` target qubits as ``n``
    (controlled) phase gates; ``diagonal_entries`` is the honest size of the
    phase tables, ``2**n`` per block.
    """

    counts: dict
    total_gates: int
    model_cost: int
    diagonal_entries: int

    def as_lines(self) -> list[str]:
        lines = [f"{name}={self.counts.get(name, 0)}" for name in GATE_NAMES.values()]
        lines += [
            f"total_gates={self.total_gates}",
            f"model_cost={self.model_cost}",
            f"diagonal_entries={self.diagonal_entries}",
        ]
        return lines


def gate_count_report(circuit: QuantumCircuit) -> GateCountReport:
    counts = {name: 0 for name in GATE_NAMES.values()}
    model = 0
    entries = 0
    for g in circuit.gates:
        counts[GATE_NAMES[type(g)]] += 1
        if isinstance(g, (DiagonalPhase, ControlledDiagonalPhase)):
            model += len(g.targets)
            entries += len(g.phases)
        else:
            model += 1
    return GateCountReport(counts, len(circuit.gates), model, entries)


def dumps_circuit(circuit: QuantumCircuit) -> str:
    """Plain-text dump, one gate per line, angles at 17 significant digits."""

    def fmt(x: float) -> str:
        return format(x, ".17g")

    lines = [f"# qfpe-circuit v1 n_qubits={circuit.n_qubits}"]
    for g in circuit.gates:
        name = GATE_NAMES[type(g)]
        if isinstance(g, Hadamard):
            lines.append(f"{name} {g.target}")
        elif isinstance(g, Phase):
            lines.append(f"{name} {g.target} {fmt(g.theta)}")
        elif isinstance(g, ControlledPhase):
            lines.append(f"{name} {g.control} {g.target} {fmt(g.theta)}")
        elif isinstance(g, Swap):
            lines.append(f"{name} {g.a} {g.b}")
        elif isinstance(g, DiagonalPhase):
            lines.append(f"{name} {','.join(map(str, g.targets))} {' '.join(map(fmt, g.phases))}")
        else:
            lines.append(f"{name} {g.control} {','.join(map(str, g.targets))} {' '.join(map(fmt, g.phases))}")
    return "\n".join(lines) + "\n"


def loads_circuit(text: str) -> QuantumCircuit:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# qfpe-circuit v1"):
        raise InvalidArgumentError("missing circuit dump header")
    n_qubits = int(lines[0].rsplit("n_qubits=", 1)[1])
    gates: list[GateOp] = []
    for ln in lines[1:]:
        name, *rest = ln.split()
        try:
            if name == "H":
                gates.append(Hadamard(int(rest[0])))
            elif name == "P":
                gates.append(Phase(int(rest[0]), float(rest[1])))
            elif name == "CP":
                gates.append(ControlledPhase(int(rest[0]), int(rest[1]), float(rest[2])))
            elif name == "SWAP":
                gates.append(Swap(int(rest[0]), int(rest[1])))
            elif name == "DIAG":
                gates.append(DiagonalPhase(tuple(map(int, rest[0].split(","))), tuple(map(float, rest[1:]))))
            elif name == "CDIAG":
                gates.append(ControlledDiagonalPhase(int(rest[0]), tuple(map(int, rest[1].split(","))),
                                                     tuple(map(float, rest[2:]))))
            else:
                raise InvalidArgumentError(f"unknown gate {name!r}")
        except (IndexError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed circuit line: {ln!r}") from exc
    return QuantumCircuit(n_qubits, tuple(gates))
