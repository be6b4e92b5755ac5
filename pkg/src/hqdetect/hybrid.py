"""Quantum feature extractors feeding classical heads.

An encoder loads a feature vector into a ``q``-qubit state, runs a fixed
parameterized circuit and reads ``Z`` on every qubit plus ``Z Z`` on
adjacent pairs, giving ``R = 2q - 1`` real features. The head (MLP or random
forest) sees either those readings alone ("serial") or the readings
concatenated with the raw features ("parallel").
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .classical.forest import RandomForestModel, RfConfig, train_rf
from .classical.mlp import MlpConfig, MlpModel, _check_xy, loss_and_gradients, train_mlp
from .errors import ShapeMismatch, UnsupportedKind
from .quantum.core import (
    Gate,
    ParameterizedCircuit,
    entangler_pairs,
    evolve,
    folded_product_amplitudes,
    z_on,
)

ENCODING_KINDS = ("none", "partial", "full", "amplitude3", "amplitude4", "amplitude5", "amplitude6")
COMPOSITIONS = ("serial", "parallel")
HEAD_KINDS = ("mlp", "rf")

# (topology, entangler, pqc blocks) per kind
_LAYOUTS = {
    "partial": ("linear", "CNOT", 1),
    "full": ("all-to-all", "CZ", 2),
    "amplitude3": ("ring", "CNOT", 3),
    "amplitude4": ("ring", "CNOT", 4),
    "amplitude5": ("ring", "CNOT", 5),
    "amplitude6": ("ring", "CNOT", 6),
}


def canonical_kind(kind) -> str:
    """Accept ``Full``, ``amplitude3``, ``Amplitude(3)``, ``amp3`` ...; return the canonical name."""
    k = re.sub(r"[\s_()\-]", "", str(kind).lower())
    k = re.sub(r"^amp(litude)?(\d)$", r"amplitude\2", k)
    if k not in ENCODING_KINDS:
        raise UnsupportedKind(f"unknown encoding kind {kind!r}; choose from {', '.join(ENCODING_KINDS)}")
    return k


def qubits_for(d: int) -> int:
    """Smallest q with 2**q >= d (at least one qubit)."""
    return max(1, math.ceil(math.log2(d))) if d > 1 else 1


@dataclass(frozen=True)
class EncodingConfig:
    kind: str
    feature_dim: int
    qubit_count: int
    topology: str = "none"
    entangler: str = ""
    pqc_layers: int = 0

    @property
    def padded_dim(self) -> int:
        return 2**self.qubit_count

    @property
    def is_amplitude(self) -> bool:
        return self.kind.startswith("amplitude")


@dataclass(frozen=True, eq=False)
class ObservableSet:
    """Readout operators; an empty set with ``identity_width`` set means pass-through."""

    observables: tuple = ()
    identity_width: int = 0

    def __post_init__(self):
        obs = tuple(self.observables)
        object.__setattr__(self, "observables", obs)
        # every built-in observable is diagonal, so readout reduces to probs @ diag
        diag = np.array([np.real(np.diag(o.matrix)) for o in obs]).T if obs else np.zeros((0, 0))
        is_diag = all(np.allclose(o.matrix, np.diag(np.diag(o.matrix))) for o in obs)
        object.__setattr__(self, "_diag", diag if is_diag else None)

    @property
    def R(self) -> int:
        return len(self.observables) or self.identity_width

    @property
    def labels(self) -> list:
        return [o.label for o in self.observables]

    def read(self, amps: np.ndarray) -> np.ndarray:
        """Expectations for a batch of state vectors ``(B, 2**q)`` -> ``(B, R)``."""
        if self._diag is not None:
            return (np.abs(amps) ** 2) @ self._diag
        return np.stack([np.real(np.einsum("bi,ij,bj->b", amps.conj(), o.matrix, amps))
                         for o in self.observables], axis=1)


def readout_observables(q: int) -> ObservableSet:
    obs = [z_on(q, [i]) for i in range(q)] + [z_on(q, [i, i + 1]) for i in range(q - 1)]
    return ObservableSet(tuple(obs))


def build_encoder(kind, d: int, seed: int = 0, zero_angles: bool = False):
    """Return ``(EncodingConfig, ParameterizedCircuit, ObservableSet)`` for ``kind`` on ``d`` features.

    PQC angles are drawn from uniform(-pi, pi) with ``default_rng(seed)``
    (or set to zero). The encoding gates themselves are not part of the
    returned circuit; they depend on the input and are applied by
    :func:`encode_states`.
    """
    kind = canonical_kind(kind)
    if d < 1:
        raise ShapeMismatch("feature dimension must be at least 1")
    if kind == "none":
        return EncodingConfig("none", d, 0), ParameterizedCircuit(0), ObservableSet((), d)
    q = qubits_for(d)
    topology, ent, blocks = _LAYOUTS[kind]
    rng = np.random.default_rng(seed)
    angles = np.zeros((blocks, q)) if zero_angles else rng.uniform(-np.pi, np.pi, size=(blocks, q))
    gates = []
    for b, row in enumerate(angles):
        gates.extend(Gate("RY", (i,), float(a)) for i, a in enumerate(row))
        gates.extend(Gate(ent, p) for p in entangler_pairs(q, topology))
        if kind == "full" and b == 0 and q >= 3:
            gates.append(Gate("CCX", (0, 1, 2)))
    circuit = ParameterizedCircuit(q, tuple(gates), topology, blocks)
    return EncodingConfig(kind, d, q, topology, ent, blocks), circuit, readout_observables(q)


@dataclass(frozen=True, eq=False)
class QuantumEncoder:
    config: EncodingConfig
    circuit: ParameterizedCircuit
    observables: ObservableSet
    seed: int = 0

    @classmethod
    def build(cls, kind, d: int, seed: int = 0, zero_angles: bool = False) -> "QuantumEncoder":
        return cls(*build_encoder(kind, d, seed, zero_angles), seed=seed)

    @property
    def width(self) -> int:
        """Length of the extracted feature vector (R, plus the norm for amplitude kinds)."""
        return self.observables.R + (1 if self.config.is_amplitude else 0)

    def with_parameters(self, theta) -> "QuantumEncoder":
        return QuantumEncoder(self.config, self.circuit.with_parameters(theta), self.observables, self.seed)


def _amplitude_batch(X: np.ndarray, q: int):
    norms = np.linalg.norm(X, axis=1)
    amps = np.zeros((len(X), 2**q), dtype=complex)
    safe = norms > 0
    amps[safe, : X.shape[1]] = X[safe] / norms[safe, None]
    amps[~safe, 0] = 1.0  # zero vector -> |0...0>
    return amps, norms


def encode_states(encoder: QuantumEncoder, X) -> np.ndarray:
    """Encoded (pre-circuit) state vectors, shape ``(B, 2**q)``."""
    cfg = encoder.config
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if cfg.is_amplitude:
        return _amplitude_batch(X, cfg.qubit_count)[0]
    return folded_product_amplitudes(X, cfg.qubit_count)


def _features(encoder: QuantumEncoder, X: np.ndarray, circuit=None) -> np.ndarray:
    cfg = encoder.config
    if cfg.kind == "none":
        return X.copy()
    amps = encode_states(encoder, X)
    out = encoder.observables.read(evolve(amps, circuit or encoder.circuit))
    if cfg.is_amplitude:
        # norm scaled into [0, 1] by its maximum sqrt(d) over the unit cube
        norms = np.linalg.norm(X, axis=1) / math.sqrt(cfg.feature_dim)
        out = np.column_stack([out, norms])
    return out


def extract_features(encoder: QuantumEncoder, x) -> np.ndarray:
    """Readout vector ``z`` for one sample, or a ``(B, width)`` matrix for a batch."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != encoder.config.feature_dim:
        raise ShapeMismatch(f"encoder expects {encoder.config.feature_dim} features, got {X.shape[1]}")
    z = _features(encoder, X)
    return z[0] if single else z


# ---------------------------------------------------------------------------
# hybrid models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HybridConfig:
    encoding: str = "full"
    composition: str = "serial"
    head: str = "rf"
    rf: RfConfig = field(default_factory=RfConfig)
    mlp: MlpConfig = field(default_factory=MlpConfig)
    train_pqc: bool = False
    pqc_learning_rate: float = 0.5
    seed: int = 0  # circuit angle seed
    n_classes: int | None = None


@dataclass(frozen=True, eq=False)
class HybridModel:
    encoder: QuantumEncoder
    head: object  # MlpModel | RandomForestModel
    composition: str = "serial"

    def __post_init__(self):
        if self.composition not in COMPOSITIONS:
            raise UnsupportedKind(f"unknown composition {self.composition!r}")
        want = self.head_input_width
        got = self.head.n_features
        if got != want:
            raise ShapeMismatch(f"head takes {got} inputs, composition needs {want}")

    @property
    def feature_dim(self) -> int:
        return self.encoder.config.feature_dim

    @property
    def head_input_width(self) -> int:
        w = self.encoder.width
        return w + self.feature_dim if self.composition == "parallel" else w

    @property
    def head_kind(self) -> str:
        return "rf" if isinstance(self.head, RandomForestModel) else "mlp"

    @property
    def n_classes(self) -> int:
        return self.head.n_classes

    def head_inputs(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        z = extract_features(self.encoder, X)
        return np.hstack([z, X]) if self.composition == "parallel" else z

    def predict_proba(self, X) -> np.ndarray:
        """Class distribution per row: softmax (MLP) or vote shares (RF)."""
        return self.head.predict_proba(self.head_inputs(X))

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


def _train_head(F, y, cfg: HybridConfig, k: int):
    head = cfg.head.lower()
    if head == "rf":
        return train_rf(F, y, replace(cfg.rf, n_classes=k))
    if head == "mlp":
        return train_mlp(F, y, replace(cfg.mlp, n_classes=k))
    raise UnsupportedKind(f"unknown head kind {cfg.head!r}")


def _refine_pqc(encoder: QuantumEncoder, head: MlpModel, X, y, composition, lr) -> QuantumEncoder:
    """One full-batch gradient step on the circuit angles through the MLP's cross-entropy.

    dL/dz comes from backprop through the head, dz/dtheta from the
    parameter-shift rule on every rotation angle.
    """
    R = encoder.observables.R
    F = np.hstack([_features(encoder, X), X]) if composition == "parallel" else _features(encoder, X)
    _, _, _, dF = loss_and_gradients(head, F, y)
    dz = dF[:, :R]
    theta = encoder.circuit.parameters
    grad = np.zeros_like(theta)
    for k in range(theta.size):
        shift = np.zeros_like(theta)
        shift[k] = np.pi / 2
        zp = _features(encoder, X, encoder.circuit.with_parameters(theta + shift))[:, :R]
        zm = _features(encoder, X, encoder.circuit.with_parameters(theta - shift))[:, :R]
        grad[k] = np.sum(dz * (zp - zm) / 2)
    return encoder.with_parameters(theta - lr * grad)


def train_hybrid(X, y, cfg: HybridConfig = HybridConfig()) -> HybridModel:
    X, y, k = _check_xy(X, y, cfg.n_classes)
    if cfg.composition not in COMPOSITIONS:
        raise UnsupportedKind(f"unknown composition {cfg.composition!r}")
    encoder = QuantumEncoder.build(cfg.encoding, X.shape[1], cfg.seed)
    model = HybridModel(encoder, _train_head(_inputs(encoder, X, cfg.composition), y, cfg, k), cfg.composition)
    if cfg.train_pqc and model.head_kind == "mlp" and encoder.circuit.parameters.size:
        encoder = _refine_pqc(encoder, model.head, X, y, cfg.composition, cfg.pqc_learning_rate)
        model = HybridModel(encoder, _train_head(_inputs(encoder, X, cfg.composition), y, cfg, k),
                            cfg.composition)
    return model


def _inputs(encoder, X, composition):
    z = _features(encoder, X)
    return np.hstack([z, X]) if composition == "parallel" else z


def predict_hybrid(model: HybridModel, x):
    """``(label, confidence)`` for one feature vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size != model.feature_dim:
        raise ShapeMismatch(f"model expects a {model.feature_dim}-vector")
    p = model.predict_proba(x)[0]
    label = int(np.argmax(p))
    return label, float(p[label])
