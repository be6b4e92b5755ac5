"""Dense state-vector and density-matrix primitives.

Qubit 0 is the most significant bit of a basis index, so ``|q0 q1 ... >``
maps to index ``q0 * 2**(n-1) + ... + q_{n-1}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import (
    DimensionMismatch,
    EmptyInput,
    InvalidIndices,
    NotHermitian,
    NotNormalized,
    NumericalError,
    OutOfRange,
    UnsupportedGate,
)

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
# product encoding angle map: phi = ANGLE_SCALE * x
ANGLE_SCALE = math.pi

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def _qubits_for_dim(dim: int) -> int:
    q = int(round(math.log2(dim))) if dim > 0 else -1
    if q < 0 or 2**q != dim:
        raise DimensionMismatch(f"dimension {dim} is not a power of two")
    return q


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, m.conj().T, atol=tol, rtol=0)


# ---------------------------------------------------------------------------
# states and operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure state on ``qubit_count`` qubits."""

    amplitudes: np.ndarray
    qubit_count: int = field(default=-1)

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        q = _qubits_for_dim(amps.size)
        if self.qubit_count not in (-1, q):
            raise DimensionMismatch(f"{amps.size} amplitudes do not describe {self.qubit_count} qubits")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"state norm^2 is {norm!r}")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "qubit_count", q)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))

    @classmethod
    def zero(cls, n_qubits: int) -> "QuantumState":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "QuantumState":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Mixed state: Hermitian, positive semidefinite, unit trace."""

    matrix: np.ndarray
    qubit_count: int = field(default=-1)

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got {m.shape}")
        q = _qubits_for_dim(m.shape[0])
        if self.qubit_count not in (-1, q):
            raise DimensionMismatch(f"{m.shape} matrix does not describe {self.qubit_count} qubits")
        if not is_hermitian(m):
            raise NotHermitian("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > NORM_TOL:
            raise NotNormalized(f"density trace is {tr!r}")
        if np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise NumericalError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "qubit_count", q)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityOperator":
        d = 2**n_qubits
        return cls(np.eye(d, dtype=complex) / d)


@dataclass(frozen=True, eq=False)
class Observable:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = _frozen(self.matrix)
        if not is_hermitian(m, 1e-12):
            raise NotHermitian(f"observable {self.label!r} is not Hermitian")
        _qubits_for_dim(m.shape[0])
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def qubit_count(self) -> int:
        return _qubits_for_dim(self.dim)


def pauli_string(label: str) -> np.ndarray:
    """Kronecker product of single-qubit Paulis, qubit 0 first."""
    out = np.ones((1, 1), dtype=complex)
    for ch in label:
        out = np.kron(out, PAULI[ch])
    return out


def pauli_observable(label: str) -> Observable:
    return Observable(pauli_string(label), label)


def z_on(n_qubits: int, qubits: Sequence[int]) -> Observable:
    chars = ["I"] * n_qubits
    for q in qubits:
        chars[q] = "Z"
    return pauli_observable("".join(chars))


# ---------------------------------------------------------------------------
# gates
# ---------------------------------------------------------------------------

ROTATIONS = {"RX": X / 2, "RY": Y / 2, "RZ": Z / 2}
FIXED_GATES = {
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
    "CCX": np.eye(8, dtype=complex)[[0, 1, 2, 3, 4, 5, 7, 6]],
}
GATE_ARITY = {"RX": 1, "RY": 1, "RZ": 1, "CNOT": 2, "CZ": 2, "SWAP": 2, "CCX": 3}


def _expm_hermitian(h: np.ndarray, theta: float) -> np.ndarray:
    """exp(-i theta h) for Hermitian h."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * theta * w)) @ v.conj().T


def rotation_matrix(kind: str, theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=complex)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    raise UnsupportedGate(kind)


@dataclass(frozen=True, eq=False)
class Gate:
    """A gate acting on ``targets``.

    Kinds: ``RX``/``RY``/``RZ`` (half-angle rotations), ``PARAM`` (generic
    ``exp(-i theta H)`` with a user generator), ``CNOT``, ``CZ``, ``SWAP``,
    ``CCX`` and ``UNITARY`` (a fixed matrix; ``tunable`` marks it as a target
    for commutator updates).
    """

    kind: str
    targets: tuple
    parameter: float | None = None
    generator: np.ndarray | None = None
    unitary: np.ndarray | None = None
    tunable: bool = False

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(set(self.targets)) != len(self.targets):
            raise InvalidIndices(f"repeated target in {self.targets}")
        kind = self.kind
        if kind in ROTATIONS:
            object.__setattr__(self, "generator", _frozen(ROTATIONS[kind]))
        if kind in ROTATIONS or kind == "PARAM":
            if self.parameter is None:
                raise NumericalError(f"{kind} gate needs a parameter")
            if self.generator is None:
                raise NumericalError("PARAM gate needs a generator")
            gen = _frozen(self.generator)
            if not is_hermitian(gen, 1e-12):
                raise NotHermitian("gate generator is not Hermitian")
            if gen.shape[0] != 2 ** len(self.targets):
                raise DimensionMismatch("generator size does not match targets")
            object.__setattr__(self, "generator", gen)
            object.__setattr__(self, "parameter", float(self.parameter))
        elif kind in FIXED_GATES:
            if len(self.targets) != GATE_ARITY[kind]:
                raise InvalidIndices(f"{kind} acts on {GATE_ARITY[kind]} qubits")
        elif kind == "UNITARY":
            u = _frozen(self.unitary)
            if u.shape != (2 ** len(self.targets),) * 2:
                raise DimensionMismatch("unitary size does not match targets")
            if not np.allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=1e-10):
                raise NumericalError("UNITARY gate matrix is not unitary")
            object.__setattr__(self, "unitary", u)
        else:
            raise UnsupportedGate(f"unknown gate kind {kind!r}")

    @property
    def parameterized(self) -> bool:
        return self.parameter is not None

    @property
    def pauli_generated(self) -> bool:
        """True when the generator has spectrum {-1/2, +1/2}."""
        if not self.parameterized:
            return False
        if self.kind in ROTATIONS:
            return True
        g = self.generator
        return np.allclose(g @ g, np.eye(g.shape[0]) / 4, atol=1e-12)

    def matrix(self) -> np.ndarray:
        if self.kind in ROTATIONS:
            return rotation_matrix(self.kind, self.parameter)
        if self.kind == "PARAM":
            return _expm_hermitian(self.generator, self.parameter)
        if self.kind == "UNITARY":
            return self.unitary
        return FIXED_GATES[self.kind]

    def with_parameter(self, theta: float) -> "Gate":
        return Gate(self.kind, self.targets, theta, self.generator, self.unitary, self.tunable)

    def with_unitary(self, u: np.ndarray) -> "Gate":
        return Gate("UNITARY", self.targets, unitary=u, tunable=self.tunable)


def apply_matrix(tensor: np.ndarray, matrix: np.ndarray, targets: Sequence[int], n: int,
                 offset: int = 0) -> np.ndarray:
    """Apply ``matrix`` to qubit axes ``targets`` of a ``(..., 2, ..., 2)`` tensor.

    ``offset`` is the index of the first of the ``n`` qubit axes, so a batch of
    states shaped ``(B, 2, ..., 2)`` uses ``offset=1``.
    """
    k = len(targets)
    g = matrix.reshape((2,) * (2 * k))
    axes = [offset + t for t in targets]
    out = np.tensordot(g, tensor, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the gate's output axes first
    return np.moveaxis(out, list(range(k)), axes)


# ---------------------------------------------------------------------------
# circuits
# ---------------------------------------------------------------------------

TOPOLOGIES = ("none", "linear", "ring", "all-to-all")


def entangler_pairs(n: int, topology: str) -> list[tuple[int, int]]:
    if topology == "none" or n < 2:
        return []
    if topology == "linear":
        return [(i, i + 1) for i in range(n - 1)]
    if topology == "ring":
        pairs = [(i, i + 1) for i in range(n - 1)]
        return pairs + [(n - 1, 0)] if n > 2 else pairs
    if topology == "all-to-all":
        return [(i, j) for i in range(n) for j in range(i + 1, n)]
    raise UnsupportedGate(f"unknown topology {topology!r}")


@dataclass(frozen=True, eq=False)
class ParameterizedCircuit:
    """Ordered gate list; gates act in list order (first gate first)."""

    n_qubits: int
    gates: tuple = ()
    topology: str = "none"
    layer_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.targets) >= self.n_qubits or min(g.targets) < 0:
                raise InvalidIndices(f"gate {g.kind} targets {g.targets} outside {self.n_qubits} qubits")

    @classmethod
    def layered(cls, n_qubits: int, angles, topology: str = "linear", entangler: str = "CNOT",
                rotation: str = "RY") -> "ParameterizedCircuit":
        """``len(angles)`` blocks of per-qubit rotations followed by an entangler layer."""
        angles = np.asarray(angles, dtype=float).reshape(-1, n_qubits) if np.size(angles) else np.zeros((0, n_qubits))
        gates = []
        for row in angles:
            gates.extend(Gate(rotation, (q,), float(a)) for q, a in enumerate(row))
            gates.extend(Gate(entangler, pair) for pair in entangler_pairs(n_qubits, topology))
        return cls(n_qubits, tuple(gates), topology, len(angles))

    @property
    def parameter_indices(self) -> list[int]:
        return [i for i, g in enumerate(self.gates) if g.parameterized]

    @property
    def parameters(self) -> np.ndarray:
        return np.array([g.parameter for g in self.gates if g.parameterized], dtype=float)

    def with_parameters(self, theta) -> "ParameterizedCircuit":
        theta = np.asarray(theta, dtype=float).ravel()
        idx = self.parameter_indices
        if theta.size != len(idx):
            raise DimensionMismatch(f"expected {len(idx)} parameters, got {theta.size}")
        gates = list(self.gates)
        for i, t in zip(idx, theta):
            gates[i] = gates[i].with_parameter(float(t))
        return ParameterizedCircuit(self.n_qubits, tuple(gates), self.topology, self.layer_count)

    def replace_gate(self, index: int, gate: Gate) -> "ParameterizedCircuit":
        gates = list(self.gates)
        gates[index] = gate
        return ParameterizedCircuit(self.n_qubits, tuple(gates), self.topology, self.layer_count)

    def then(self, other: "ParameterizedCircuit") -> "ParameterizedCircuit":
        if other.n_qubits != self.n_qubits:
            raise DimensionMismatch("cannot concatenate circuits of different width")
        return ParameterizedCircuit(self.n_qubits, self.gates + other.gates, other.topology,
                                    self.layer_count + other.layer_count)

    def unitary(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Matrix of gates[start:stop] (later gates multiply on the left)."""
        d = 2**self.n_qubits
        cols = np.eye(d, dtype=complex).reshape((d,) + (2,) * self.n_qubits)
        for g in self.gates[start:stop]:
            cols = apply_matrix(cols, g.matrix(), g.targets, self.n_qubits, offset=1)
        return cols.reshape(d, d).T


def embed(matrix: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Full 2^n x 2^n operator acting as ``matrix`` on ``targets``."""
    d = 2**n
    cols = np.eye(d, dtype=complex).reshape((d,) + (2,) * n)
    cols = apply_matrix(cols, np.asarray(matrix, dtype=complex), targets, n, offset=1)
    return cols.reshape(d, d).T


def evolve(amplitudes: np.ndarray, circuit: ParameterizedCircuit) -> np.ndarray:
    """Run ``circuit`` on raw amplitudes; accepts a leading batch axis."""
    n = circuit.n_qubits
    a = np.asarray(amplitudes, dtype=complex)
    batch = a.ndim == 2
    t = a.reshape(((a.shape[0],) if batch else ()) + (2,) * n)
    for g in circuit.gates:
        t = apply_matrix(t, g.matrix(), g.targets, n, offset=1 if batch else 0)
    return t.reshape(a.shape)


def apply_circuit(state: QuantumState, circuit: ParameterizedCircuit) -> QuantumState:
    if state.qubit_count != circuit.n_qubits:
        raise DimensionMismatch(f"circuit on {circuit.n_qubits} qubits, state on {state.qubit_count}")
    return QuantumState(evolve(state.amplitudes, circuit))


# ---------------------------------------------------------------------------
# encodings
# ---------------------------------------------------------------------------

def amplitude_encode(x) -> QuantumState:
    """Load a unit-norm vector into amplitudes, zero-padding to a power of two."""
    x = np.asarray(x, dtype=float).ravel()
    d = x.size
    if d == 0:
        raise EmptyInput("cannot encode an empty vector")
    norm = float(np.linalg.norm(x))
    if abs(norm - 1.0) > 1e-8:
        raise NotNormalized(f"input norm is {norm!r}, expected 1")
    q = max(1, math.ceil(math.log2(d)))
    amps = np.zeros(2**q, dtype=complex)
    amps[:d] = x / norm
    return QuantumState(amps)


def _check_unit_interval(x: np.ndarray) -> None:
    if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x > 1):
        raise OutOfRange("product encoding expects features in [0, 1]")


def product_encode(x) -> QuantumState:
    """Tensor product of R_Y(pi * x_i)|0>, one qubit per feature."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise EmptyInput("cannot encode an empty vector")
    _check_unit_interval(x)
    half = ANGLE_SCALE * x / 2
    amps = np.ones(1, dtype=complex)
    for c, s in zip(np.cos(half), np.sin(half)):
        amps = np.kron(amps, np.array([c, s]))
    return QuantumState(amps)


def folded_product_amplitudes(X: np.ndarray, n_qubits: int) -> np.ndarray:
    """Product encoding of ``d`` features on ``n_qubits`` qubits (batched).

    Feature ``j`` rotates qubit ``j % n_qubits``; successive passes alternate
    the rotation axis Y, Z, Y, ... so the per-qubit Bloch vector keeps every
    feature it received. With ``d <= n_qubits`` this reduces to
    :func:`product_encode` padded with ``|0>`` qubits. Returns ``(B, 2**n)``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    _check_unit_interval(X)
    B, d = X.shape
    qubit = np.zeros((B, n_qubits, 2), dtype=complex)
    qubit[:, :, 0] = 1.0
    for j in range(d):
        q, rnd = j % n_qubits, j // n_qubits
        half = ANGLE_SCALE * X[:, j] / 2
        c, s = np.cos(half), np.sin(half)
        a0, a1 = qubit[:, q, 0].copy(), qubit[:, q, 1].copy()
        if rnd % 2 == 0:
            qubit[:, q, 0] = c * a0 - s * a1
            qubit[:, q, 1] = s * a0 + c * a1
        else:
            qubit[:, q, 0] = (c - 1j * s) * a0
            qubit[:, q, 1] = (c + 1j * s) * a1
    amps = qubit[:, 0, :]
    for q in range(1, n_qubits):
        amps = (amps[:, :, None] * qubit[:, q, None, :]).reshape(B, -1)
    return amps


# ---------------------------------------------------------------------------
# measurement and reduction
# ---------------------------------------------------------------------------

def _density_matrix(state) -> np.ndarray:
    if isinstance(state, QuantumState):
        return np.outer(state.amplitudes, state.amplitudes.conj())
    if isinstance(state, DensityOperator):
        return state.matrix
    return np.asarray(state, dtype=complex)


def expectation(state, obs: Observable) -> float:
    """Tr(M rho) for a pure or mixed state."""
    if state.dim != obs.dim:
        raise DimensionMismatch(f"observable dim {obs.dim} vs state dim {state.dim}")
    if isinstance(state, QuantumState):
        a = state.amplitudes
        val = np.vdot(a, obs.matrix @ a)
    else:
        val = np.trace(obs.matrix @ state.matrix)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise NumericalError(f"expectation has imaginary part {val.imag!r}")
    return float(val.real)


def partial_trace_matrix(m: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    """Trace out every qubit not in ``keep``; the result orders qubits as ``keep`` does."""
    keep = list(keep)
    t = np.asarray(m).reshape((2,) * (2 * n))
    row = list(range(n))
    col = [n + q if q in keep else q for q in range(n)]
    out = [q for q in keep] + [n + q for q in keep]
    res = np.einsum(t, row + col, out)
    k = 2 ** len(keep)
    return res.reshape(k, k)


def partial_trace(rho: DensityOperator, keep: Sequence[int]) -> DensityOperator:
    n = rho.qubit_count
    keep = list(keep)
    if not keep or len(set(keep)) != len(keep) or any(q < 0 or q >= n for q in keep):
        raise InvalidIndices(f"keep={keep} is not a nonempty subset of 0..{n - 1}")
    return DensityOperator(partial_trace_matrix(rho.matrix, sorted(keep), n))


def von_neumann_entropy(rho: DensityOperator) -> float:
    w = np.linalg.eigvalsh(rho.matrix)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


# ---------------------------------------------------------------------------
# random objects for property checks
# ---------------------------------------------------------------------------

def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(n_qubits: int, rng: np.random.Generator) -> QuantumState:
    v = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
    return QuantumState(v / np.linalg.norm(v))


def random_density(n_qubits: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    d = 2**n_qubits
    rank = rank or d
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityOperator(m / np.trace(m).real)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2
