"""Measurement-cost estimators: SWAP-test purity, shot noise, copy counts."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import LengthMismatch, OutOfRange, ResourceOverflow
from .core import DensityOperator

INT64_MAX = 2**63 - 1


def swap_operator(n_qubits: int) -> np.ndarray:
    """SWAP between two n-qubit registers: S|i>|j> = |j>|i>."""
    d = 2**n_qubits
    s = np.zeros((d * d, d * d))
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    s[(j * d + i).ravel(), (i * d + j).ravel()] = 1.0
    return s


def swap_trick_purity(X: DensityOperator) -> float:
    """Tr(S (X (x) X)), which equals Tr(X^2)."""
    s = swap_operator(X.qubit_count)
    return float(np.trace(s @ np.kron(X.matrix, X.matrix)).real)


def projection_noise_bound(p: float, shots: int) -> float:
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"probability {p!r} outside [0, 1]")
    if int(shots) != shots or shots < 1:
        raise OutOfRange(f"shots must be a positive integer, got {shots!r}")
    return math.sqrt(p * (1.0 - p) / shots)


@dataclass(frozen=True)
class ResourceEstimate:
    n_copies: int
    n_tomography: int
    n_proj: int
    m_list: tuple
    d_list: tuple

    @property
    def ratio(self) -> float | None:
        """Tomography copies per adjoint-propagation copy (None when no copies)."""
        return self.n_tomography / self.n_copies if self.n_copies else None


def _checked(value: int) -> int:
    if value > INT64_MAX:
        raise ResourceOverflow(f"count {value} exceeds the signed 64-bit range")
    return value


def resource_counts(n_proj: int, m_list, d_list) -> ResourceEstimate:
    """Copies per training round for adjoint propagation vs. full tomography.

    ``m_list`` and ``d_list`` are indexed from layer 0 (input) to layer L+1;
    sums run over l = 1..L+1 and use entry l-1 for the previous layer.
    """
    m = tuple(int(v) for v in m_list)
    d = tuple(int(v) for v in d_list)
    if n_proj < 0 or any(v < 0 for v in m + d):
        raise OutOfRange("resource inputs must be nonnegative")
    if d and len(d) != len(m):
        raise LengthMismatch(f"m_list has {len(m)} entries but d_list has {len(d)}")
    copies = 0
    tom = 0
    for l in range(1, len(m)):
        copies = _checked(copies + _checked(m[l] * _checked(4 ** (m[l - 1] + 1) - 1)))
        if d:
            tom = _checked(tom + _checked(m[l] * 2 * _checked((d[l] * d[l - 1]) ** 2 - 1)))
    return ResourceEstimate(_checked(n_proj * copies), _checked(n_proj * tom), int(n_proj), m, d)
