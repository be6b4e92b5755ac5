"""Gradients and updates for parameterized circuits and channel networks.

A network is a sequence of :class:`NetworkLayer` values. Each layer runs a
gate-level circuit on its system register followed by a fresh ancilla
register (ancilla in |0>), then traces the ancilla out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

from ..errors import (
    DimensionMismatch,
    EmptyBatch,
    LengthMismatch,
    NotHermitian,
    NumericalError,
    UnsupportedGate,
)
from .channels import (
    QuantumChannel,
    channel_adjoint_matrix,
    channel_apply_matrix,
    embed_with_ancilla,
)
from .core import (
    Gate,
    Observable,
    ParameterizedCircuit,
    QuantumState,
    embed,
    evolve,
    is_hermitian,
    partial_trace_matrix,
)

FD_EPS = 1e-5


@dataclass(frozen=True, eq=False)
class FidelityCostConfig:
    targets: tuple
    mode: str = "maximize"

    def __post_init__(self):
        targets = tuple(np.asarray(getattr(t, "matrix", t), dtype=complex) for t in self.targets)
        for t in targets:
            if not is_hermitian(t):
                raise NotHermitian("fidelity target is not Hermitian")
            w = np.linalg.eigvalsh(t)
            if w.min() < -1e-10 or w.max() > 1 + 1e-10:
                raise NumericalError("fidelity target eigenvalues must lie in [0, 1]")
        if self.mode not in ("maximize", "minimize"):
            raise ValueError(f"unknown fidelity mode {self.mode!r}")
        object.__setattr__(self, "targets", targets)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    regularization: float = 1.0
    epochs: int = 200
    seed: int = 0
    tolerance: float = 1e-7


@dataclass(frozen=True, eq=False)
class GradientVector:
    values: np.ndarray
    method: str

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


@dataclass(frozen=True, eq=False)
class UpdateMatrix:
    K: np.ndarray
    layer: int
    gate: int


@dataclass(frozen=True, eq=False)
class NetworkLayer:
    circuit: ParameterizedCircuit
    system_qubits: int
    ancilla_qubits: int = 0

    def __post_init__(self):
        if self.circuit.n_qubits != self.system_qubits + self.ancilla_qubits:
            raise DimensionMismatch("layer circuit must span system + ancilla qubits")

    @property
    def n_qubits(self) -> int:
        return self.system_qubits + self.ancilla_qubits

    def channel(self) -> QuantumChannel:
        return QuantumChannel(self.circuit.unitary(), self.system_qubits, self.ancilla_qubits)

    def with_circuit(self, circuit: ParameterizedCircuit) -> "NetworkLayer":
        return NetworkLayer(circuit, self.system_qubits, self.ancilla_qubits)


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, QuantumState):
        return np.outer(x.amplitudes, x.amplitudes.conj())
    return np.asarray(getattr(x, "matrix", x), dtype=complex)


# ---------------------------------------------------------------------------
# cost
# ---------------------------------------------------------------------------

def fidelity_cost(outputs: Sequence, cfg: FidelityCostConfig) -> float:
    """Mean of Tr(P_x rho_x); ``minimize`` mode returns one minus that."""
    if len(outputs) != len(cfg.targets):
        raise LengthMismatch(f"{len(outputs)} outputs for {len(cfg.targets)} targets")
    if not outputs:
        raise EmptyBatch("fidelity of an empty batch")
    total = 0.0
    for rho, p in zip(outputs, cfg.targets):
        r = _as_matrix(rho)
        if r.shape != p.shape:
            raise DimensionMismatch(f"output {r.shape} vs target {p.shape}")
        total += np.trace(p @ r).real
    c = total / len(outputs)
    return c if cfg.mode == "maximize" else 1.0 - c


# ---------------------------------------------------------------------------
# network passes
# ---------------------------------------------------------------------------

def network_forward(layers: Sequence[NetworkLayer], x0) -> list[np.ndarray]:
    """States X_0..X_L."""
    xs = [_as_matrix(x0)]
    for layer in layers:
        xs.append(channel_apply_matrix(layer.channel(), xs[-1]))
    return xs


def network_backward(layers: Sequence[NetworkLayer], obs) -> list[np.ndarray]:
    """Observables A_0..A_L with A_L = M and A_{l-1} = E_l^dag(A_l)."""
    a = _as_matrix(obs)
    out = [a]
    for layer in reversed(layers):
        a = channel_adjoint_matrix(layer.channel(), a)
        out.append(a)
    return out[::-1]


def network_expectation(layers: Sequence[NetworkLayer], x0, obs) -> float:
    x = network_forward(layers, x0)[-1]
    return float(np.trace(_as_matrix(obs) @ x).real)


def _full_gate(g: Gate, n: int) -> np.ndarray:
    return embed(g.matrix(), g.targets, n)


# ---------------------------------------------------------------------------
# gradients
# ---------------------------------------------------------------------------

def finite_difference_grad(evaluate: Callable[[np.ndarray], float], theta, eps: float = FD_EPS) -> np.ndarray:
    """Central differences, one coordinate at a time."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    theta = np.asarray(theta, dtype=float).ravel()
    grad = np.zeros_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = eps
        grad[i] = (evaluate(theta + e) - evaluate(theta - e)) / (2 * eps)
    return grad


def circuit_expectation(circuit: ParameterizedCircuit, state: QuantumState, obs: Observable) -> float:
    a = evolve(state.amplitudes, circuit)
    return float(np.vdot(a, obs.matrix @ a).real)


def parameter_shift_grad(circuit: ParameterizedCircuit, state: QuantumState, obs: Observable) -> GradientVector:
    """Exact gradient from two evaluations shifted by +-pi/2 per parameter."""
    if state.qubit_count != circuit.n_qubits or obs.dim != state.dim:
        raise DimensionMismatch("circuit, state and observable sizes differ")
    for g in circuit.gates:
        if g.parameterized and not g.pauli_generated:
            raise UnsupportedGate(f"{g.kind} gate on {g.targets} is not Pauli-generated")
    theta = circuit.parameters
    grad = np.zeros_like(theta)
    shift = math.pi / 2
    for i in range(theta.size):
        plus, minus = theta.copy(), theta.copy()
        plus[i] += shift
        minus[i] -= shift
        grad[i] = (circuit_expectation(circuit.with_parameters(plus), state, obs)
                   - circuit_expectation(circuit.with_parameters(minus), state, obs)) / 2
    return GradientVector(grad, "parameter-shift")


def adjoint_backprop_grad(layers: Sequence[NetworkLayer], x0, obs) -> GradientVector:
    """Gradient of Tr(M X_L) over every parameterized gate, layer by layer.

    One forward pass caches X_l, one adjoint sweep gives A_l, and each gate
    contributes Tr(A_l dE_l(X_{l-1})/dtheta) with dU = U_after (-iH U_j) U_before.
    """
    layers = list(layers)
    xs = network_forward(layers, x0)
    a_s = network_backward(layers, obs)
    grads = []
    for l, layer in enumerate(layers, start=1):
        n = layer.n_qubits
        rho = embed_with_ancilla(xs[l - 1], 2**layer.ancilla_qubits)
        a_full = np.kron(a_s[l], np.eye(2**layer.ancilla_qubits))
        gates = layer.circuit.gates
        mats = [_full_gate(g, n) for g in gates]
        d = 2**n
        prefix = [np.eye(d, dtype=complex)]
        for m in mats:
            prefix.append(m @ prefix[-1])
        suffix = [np.eye(d, dtype=complex)]
        for m in reversed(mats):
            suffix.append(suffix[-1] @ m)
        suffix = suffix[::-1]  # suffix[j] = product of gates j..end
        u = prefix[-1]
        for j, g in enumerate(gates):
            if not g.parameterized:
                continue
            h = embed(g.generator, g.targets, n)
            du = suffix[j + 1] @ (-1j * h @ mats[j]) @ prefix[j]
            d_state = du @ rho @ u.conj().T
            d_state = d_state + d_state.conj().T
            grads.append(np.trace(a_full @ d_state).real)
    return GradientVector(np.array(grads, dtype=float), "adjoint")


def circuit_as_network(circuit: ParameterizedCircuit) -> list[NetworkLayer]:
    return [NetworkLayer(circuit, circuit.n_qubits, 0)]


def network_parameters(layers: Sequence[NetworkLayer]) -> np.ndarray:
    return np.concatenate([l.circuit.parameters for l in layers]) if layers else np.zeros(0)


def with_network_parameters(layers: Sequence[NetworkLayer], theta) -> list[NetworkLayer]:
    theta = np.asarray(theta, dtype=float)
    out, k = [], 0
    for layer in layers:
        n = layer.circuit.parameters.size
        out.append(layer.with_circuit(layer.circuit.with_parameters(theta[k:k + n])))
        k += n
    if k != theta.size:
        raise DimensionMismatch(f"expected {k} parameters, got {theta.size}")
    return out


# ---------------------------------------------------------------------------
# commutator updates
# ---------------------------------------------------------------------------

def _local_blocks(layer: NetworkLayer, x_in: np.ndarray, a_out: np.ndarray):
    """Yield (gate index, forward state after gate, backward observable after gate)."""
    n = layer.n_qubits
    gates = layer.circuit.gates
    mats = [_full_gate(g, n) for g in gates]
    states = []
    rho = embed_with_ancilla(x_in, 2**layer.ancilla_qubits)
    for m in mats:
        rho = m @ rho @ m.conj().T
        states.append(rho)
    b = np.kron(a_out, np.eye(2**layer.ancilla_qubits))
    blocks = [None] * len(gates)
    for j in range(len(gates) - 1, -1, -1):
        blocks[j] = b
        b = mats[j].conj().T @ b @ mats[j]
    for j in range(len(gates)):
        yield j, states[j], blocks[j]


def local_commutator(a: np.ndarray, b: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Tr_rest([A, B]) on the gate's support, qubits ordered as ``targets``."""
    return partial_trace_matrix(a @ b - b @ a, list(targets), n)


def commutator_update_matrices(batch: Sequence[tuple], layers: Sequence[NetworkLayer],
                               regularization: float) -> list[UpdateMatrix]:
    """K = (1/(2 lambda N)) sum_x i Tr_rest([A_x, B_x]) for every tunable gate.

    ``batch`` holds ``(input state, target projector)`` pairs. A_x is the
    forward state right after the gate and B_x the target observable pulled
    back to that point, so ``exp(i eta K)`` applied after the gate climbs the
    mean fidelity for small ``eta``.
    """
    if not batch:
        raise EmptyBatch("commutator update needs at least one sample")
    if regularization <= 0:
        raise ValueError("regularization must be positive")
    layers = list(layers)
    acc: dict[tuple[int, int], np.ndarray] = {}
    for x_in, target in batch:
        xs = network_forward(layers, x_in)
        a_s = network_backward(layers, target)
        for l, layer in enumerate(layers, start=1):
            for j, a, b in _local_blocks(layer, xs[l - 1], a_s[l]):
                g = layer.circuit.gates[j]
                if not g.tunable:
                    continue
                m = 1j * local_commutator(a, b, g.targets, layer.n_qubits)
                key = (l - 1, j)
                acc[key] = acc[key] + m if key in acc else m
    scale = 1.0 / (2.0 * regularization * len(batch))
    out = []
    for (l, j), m in sorted(acc.items()):
        k = scale * m
        out.append(UpdateMatrix((k + k.conj().T) / 2, l, j))
    return out


def apply_unitary_update(gate, K, eta: float):
    """exp(i eta K) U; accepts a :class:`Gate` or a bare matrix."""
    K = np.asarray(getattr(K, "K", K), dtype=complex)
    if not is_hermitian(K):
        raise NotHermitian("update matrix is not Hermitian")
    step = expm(1j * eta * K)
    if isinstance(gate, Gate):
        return gate.with_unitary(step @ gate.matrix())
    return step @ np.asarray(gate, dtype=complex)


def apply_updates(layers: Sequence[NetworkLayer], updates: Sequence[UpdateMatrix], eta: float) -> list[NetworkLayer]:
    layers = list(layers)
    for up in updates:
        layer = layers[up.layer]
        gate = layer.circuit.gates[up.gate]
        layers[up.layer] = layer.with_circuit(layer.circuit.replace_gate(up.gate, apply_unitary_update(gate, up, eta)))
    return layers


def network_fidelity(layers: Sequence[NetworkLayer], batch: Sequence[tuple]) -> float:
    outputs = [network_forward(layers, x)[-1] for x, _ in batch]
    return fidelity_cost(outputs, FidelityCostConfig(tuple(t for _, t in batch)))


@dataclass
class TrainHistory:
    fidelity: list = field(default_factory=list)
    update_norm: list = field(default_factory=list)


def train_commutator(layers: Sequence[NetworkLayer], batch: Sequence[tuple], cfg: TrainConfig):
    """Repeated commutator updates; stops on small update norm or the epoch cap."""
    layers = list(layers)
    hist = TrainHistory()
    hist.fidelity.append(network_fidelity(layers, batch))
    for _ in range(cfg.epochs):
        updates = commutator_update_matrices(batch, layers, cfg.regularization)
        norm = math.sqrt(sum(float(np.sum(np.abs(u.K) ** 2)) for u in updates))
        hist.update_norm.append(norm)
        if norm < cfg.tolerance:
            break
        layers = apply_updates(layers, updates, cfg.learning_rate)
        hist.fidelity.append(network_fidelity(layers, batch))
    return layers, hist
