"""Stinespring channels: a unitary on system (+) ancilla, ancilla starting in |0>."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, NumericalError
from .core import DensityOperator, Observable, _frozen, partial_trace_matrix


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map ``X -> Tr_anc(U (X (x) |0><0|) U^dag)``.

    The system register occupies the leading (most significant) qubits of
    ``unitary``; the ancilla register follows it.
    """

    unitary: np.ndarray
    system_qubits: int
    ancilla_qubits: int = 0

    def __post_init__(self):
        u = _frozen(self.unitary)
        d = 2 ** (self.system_qubits + self.ancilla_qubits)
        if u.shape != (d, d):
            raise DimensionMismatch(f"unitary {u.shape} does not act on {d}-dim system+ancilla")
        if not np.allclose(u @ u.conj().T, np.eye(d), atol=1e-10, rtol=0):
            raise NumericalError("channel unitary is not unitary")
        object.__setattr__(self, "unitary", u)

    @property
    def system_dim(self) -> int:
        return 2**self.system_qubits

    @property
    def ancilla_dim(self) -> int:
        return 2**self.ancilla_qubits

    @classmethod
    def identity(cls, system_qubits: int, ancilla_qubits: int = 0) -> "QuantumChannel":
        return cls(np.eye(2 ** (system_qubits + ancilla_qubits)), system_qubits, ancilla_qubits)

    def isometry(self) -> np.ndarray:
        """V = U (I (x) |0>): the columns of U with the ancilla in |0>."""
        return self.unitary[:, :: self.ancilla_dim]


def embed_with_ancilla(x: np.ndarray, ancilla_dim: int) -> np.ndarray:
    anc = np.zeros((ancilla_dim, ancilla_dim), dtype=complex)
    anc[0, 0] = 1.0
    return np.kron(x, anc)


def channel_apply_matrix(ch: QuantumChannel, x: np.ndarray) -> np.ndarray:
    if x.shape != (ch.system_dim, ch.system_dim):
        raise DimensionMismatch(f"input {x.shape} vs channel system dim {ch.system_dim}")
    v = ch.isometry()
    full = v @ x @ v.conj().T
    n = ch.system_qubits + ch.ancilla_qubits
    return partial_trace_matrix(full, range(ch.system_qubits), n)


def channel_apply(ch: QuantumChannel, X: DensityOperator) -> DensityOperator:
    out = channel_apply_matrix(ch, X.matrix)
    return DensityOperator((out + out.conj().T) / 2)


def channel_adjoint_matrix(ch: QuantumChannel, a: np.ndarray) -> np.ndarray:
    """Heisenberg-picture map ``A -> <0|_anc U^dag (A (x) I) U |0>_anc``.

    Projecting the ancilla onto |0> (rather than tracing it) is what makes
    ``Tr(A E(B)) == Tr(E^dag(A) B)`` hold and keeps ``E^dag(I) = I``.
    """
    if a.shape != (ch.system_dim, ch.system_dim):
        raise DimensionMismatch(f"observable {a.shape} vs channel system dim {ch.system_dim}")
    v = ch.isometry()
    return v.conj().T @ np.kron(a, np.eye(ch.ancilla_dim)) @ v


def channel_adjoint_apply(ch: QuantumChannel, A: Observable) -> Observable:
    out = channel_adjoint_matrix(ch, A.matrix)
    return Observable((out + out.conj().T) / 2, A.label)


def compose(first: QuantumChannel, second: QuantumChannel) -> QuantumChannel:
    """Single channel equal to ``second o first``; ancillas are stacked (first's, then second's)."""
    if first.system_qubits != second.system_qubits:
        raise DimensionMismatch("channels act on different system sizes")
    ds, da1, da2 = first.system_dim, first.ancilla_dim, second.ancilla_dim
    u1 = np.kron(first.unitary, np.eye(da2))
    # second acts on system and its own ancilla; move anc1 out of the way
    u2 = second.unitary.reshape(ds, da2, ds, da2)
    u2 = np.einsum("iajb,kl->ikajlb", u2, np.eye(da1)).reshape(ds * da1 * da2, ds * da1 * da2)
    return QuantumChannel(u2 @ u1, first.system_qubits, first.ancilla_qubits + second.ancilla_qubits)
