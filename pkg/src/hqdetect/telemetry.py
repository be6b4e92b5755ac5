"""Synthetic O-RAN telemetry: three layer views over one 23-feature record.

Every constant that shapes the generated data lives in ``BASELINE_MEANS``
and ``CLASS_SHIFTS`` below.
"""
from __future__ import annotations

import csv
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyDataset,
    EmptyFile,
    InvalidLayer,
    InvalidSpec,
    MissingColumn,
    ParseError,
)

LAYER1_FEATURES = (
    "connection_request_rate",
    "connection_setup_time",
    "mobility_index",
    "paging_response_rate",
    "control_plane_entropy",
    "scheduling_anomaly_score",
)
LAYER2_FEATURES = (
    "harq_retransmission_count",
    "flow_interarrival_time",
    "packet_size_variance",
    "jitter_index",
    "radio_link_failure_rate",
    "registration_failure_rate",
)
LAYER3_FEATURES = (
    "rsrp",
    "rsrq",
    "rssi_nr",
    "throughput",
    "prb_usage",
    "port_scan_rate",
    "packet_drop_rate",
    "unauthorized_access",
    "malicious_payload_size",
    "exfil_flow_duration",
    "upload_ratio",
)
FEATURES = LAYER1_FEATURES + LAYER2_FEATURES + LAYER3_FEATURES
FEATURE_INDEX = {name: i for i, name in enumerate(FEATURES)}
LAYER_VIEWS = {1: LAYER1_FEATURES, 2: LAYER2_FEATURES, 3: LAYER3_FEATURES}

CLASS_NAMES = ("Normal", "DoS", "Spoofing", "Exfiltration", "Malware", "Reconnaissance")
N_CLASSES = len(CLASS_NAMES)
N_SLICES = 3  # eMBB, URLLC, mMTC

# Class-0 (Normal) feature means. unauthorized_access is the Bernoulli rate.
BASELINE_MEANS = {
    "connection_request_rate": 0.30,
    "connection_setup_time": 0.30,
    "mobility_index": 0.30,
    "paging_response_rate": 0.70,
    "control_plane_entropy": 0.35,
    "scheduling_anomaly_score": 0.25,
    "harq_retransmission_count": 0.25,
    "flow_interarrival_time": 0.35,
    "packet_size_variance": 0.30,
    "jitter_index": 0.25,
    "radio_link_failure_rate": 0.20,
    "registration_failure_rate": 0.20,
    "rsrp": 0.55,
    "rsrq": 0.50,
    "rssi_nr": 0.55,
    "throughput": 0.40,
    "prb_usage": 0.45,
    "port_scan_rate": 0.15,
    "packet_drop_rate": 0.20,
    "unauthorized_access": 0.05,
    "malicious_payload_size": 0.15,
    "exfil_flow_duration": 0.20,
    "upload_ratio": 0.30,
}
MEAN_VECTOR = np.array([BASELINE_MEANS[f] for f in FEATURES])
UNAUTHORIZED_ATTACK_RATE = 0.8

# (feature, mode, scale): mode "up"/"down" shifts by +-scale*delta, "pm" by a
# random sign, "bernoulli" redraws the flag with UNAUTHORIZED_ATTACK_RATE.
CLASS_SHIFTS = {
    0: (),
    1: (  # DoS
        ("connection_request_rate", "up", 1.0),
        ("connection_setup_time", "up", 1.0),
        ("scheduling_anomaly_score", "up", 1.0),
        ("harq_retransmission_count", "up", 1.0),
        ("jitter_index", "up", 1.0),
        ("throughput", "up", 1.0),
        ("prb_usage", "up", 1.0),
    ),
    2: (  # Spoofing
        ("mobility_index", "up", 1.0),
        ("paging_response_rate", "down", 1.0),
        ("radio_link_failure_rate", "up", 1.0),
        ("registration_failure_rate", "up", 1.0),
        ("rsrp", "pm", 1.0),
        ("rsrq", "pm", 1.0),
        ("unauthorized_access", "bernoulli", 1.0),
    ),
    3: (  # Exfiltration
        ("scheduling_anomaly_score", "up", 1.0),
        ("flow_interarrival_time", "up", 1.0),
        ("jitter_index", "up", 1.0),
        ("exfil_flow_duration", "up", 1.0),
        ("upload_ratio", "up", 1.0),
    ),
    4: (  # Malware
        ("control_plane_entropy", "up", 1.0),
        ("connection_setup_time", "up", 1.0),
        ("packet_size_variance", "up", 1.0),
        ("registration_failure_rate", "up", 1.0),
        ("malicious_payload_size", "up", 1.0),
        ("unauthorized_access", "bernoulli", 1.0),
    ),
    5: (  # Reconnaissance
        ("mobility_index", "up", 1.0),
        ("control_plane_entropy", "up", 1.0),
        ("packet_size_variance", "up", 1.0),
        ("port_scan_rate", "up", 1.0),
        ("prb_usage", "pm", 0.5),
    ),
}

QOS_THRESHOLD = 0.5
INDICATOR_NAMES = (
    "dos_burstiness",
    "spoofing_signal_deviation",
    "replay_timing_offset",
    "qos_violation_frequency",
    "slice_resource_deviation",
)


# ---------------------------------------------------------------------------
# records and datasets
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MasterTelemetryRecord:
    values: np.ndarray
    sample_id: int = 0
    slice_id: int = 0
    timestamp: int = 0

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True).ravel()
        if v.size != len(FEATURES):
            raise ValueError(f"record needs {len(FEATURES)} features, got {v.size}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __getitem__(self, name: str) -> float:
        return float(self.values[FEATURE_INDEX[name]])

    def as_dict(self) -> dict:
        return dict(zip(FEATURES, self.values.tolist()))


@dataclass(frozen=True)
class LabeledSample:
    record: MasterTelemetryRecord
    attack_class: int
    l1_anomaly: int
    l2_intrusion: int


class TelemetryDataset(Sequence):
    """Column-oriented dataset that also behaves as a list of :class:`LabeledSample`."""

    def __init__(self, features, attack_class, l1_anomaly=None, l2_intrusion=None,
                 sample_id=None, slice_id=None, timestamp=None, metadata=None):
        self.features = np.asarray(features, dtype=float).reshape(-1, len(FEATURES))
        n = len(self.features)
        self.attack_class = np.asarray(attack_class, dtype=int).reshape(n)
        attack = (self.attack_class != 0).astype(int)
        self.l1_anomaly = attack if l1_anomaly is None else np.asarray(l1_anomaly, dtype=int).reshape(n)
        self.l2_intrusion = attack if l2_intrusion is None else np.asarray(l2_intrusion, dtype=int).reshape(n)
        self.sample_id = np.arange(n) if sample_id is None else np.asarray(sample_id, dtype=int).reshape(n)
        self.slice_id = np.zeros(n, dtype=int) if slice_id is None else np.asarray(slice_id, dtype=int).reshape(n)
        self.timestamp = np.arange(n) if timestamp is None else np.asarray(timestamp, dtype=int).reshape(n)
        self.metadata = dict(metadata or {})

    def __len__(self):
        return len(self.features)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return self.subset(np.arange(len(self))[i])
        rec = MasterTelemetryRecord(self.features[i], int(self.sample_id[i]), int(self.slice_id[i]),
                                    int(self.timestamp[i]))
        return LabeledSample(rec, int(self.attack_class[i]), int(self.l1_anomaly[i]), int(self.l2_intrusion[i]))

    def record(self, i) -> MasterTelemetryRecord:
        return self[i].record

    def subset(self, idx) -> "TelemetryDataset":
        idx = np.asarray(idx, dtype=int)
        return TelemetryDataset(self.features[idx], self.attack_class[idx], self.l1_anomaly[idx],
                                self.l2_intrusion[idx], self.sample_id[idx], self.slice_id[idx],
                                self.timestamp[idx], self.metadata)

    def view(self, layer: int) -> np.ndarray:
        return self.features[:, _view_indices(layer)]

    def labels(self, layer: int) -> np.ndarray:
        """Binary anomaly flag (1), binary intrusion flag (2) or attack class (3)."""
        _view_indices(layer)
        return {1: self.l1_anomaly, 2: self.l2_intrusion, 3: self.attack_class}[layer]

    def class_counts(self) -> list:
        return np.bincount(self.attack_class, minlength=N_CLASSES).tolist()


def _view_indices(layer) -> list:
    if layer not in LAYER_VIEWS:
        raise InvalidLayer(f"layer must be 1, 2 or 3, got {layer!r}")
    return [FEATURE_INDEX[f] for f in LAYER_VIEWS[layer]]


def project_layer_view(record: MasterTelemetryRecord, layer: int) -> np.ndarray:
    return record.values[_view_indices(layer)].copy()


def layer_labels(layer: int) -> int:
    """Number of classes the head for ``layer`` predicts."""
    _view_indices(layer)
    return N_CLASSES if layer == 3 else 2


# ---------------------------------------------------------------------------
# generator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorSpec:
    n_samples: int = 10000
    proportions: tuple | None = None  # None = uniform over the six classes
    seed: int = 0
    delta: float = 0.3
    sigma: float = 0.08
    rho: float = 0.05
    binary_unauthorized: bool = True

    def class_counts(self) -> list:
        props = np.full(N_CLASSES, 1.0 / N_CLASSES) if self.proportions is None else np.asarray(self.proportions, float)
        if props.shape != (N_CLASSES,) or np.any(props < 0) or props.sum() <= 0:
            raise InvalidSpec("proportions must be six nonnegative weights")
        props = props / props.sum()
        raw = props * self.n_samples
        counts = np.floor(raw).astype(int)
        # largest remainder, ties to the lower class index
        rem = raw - counts
        for k in np.argsort(-rem, kind="stable")[: self.n_samples - counts.sum()]:
            counts[k] += 1
        return counts.tolist()


def _validate(spec: GeneratorSpec) -> None:
    if spec.n_samples < 0:
        raise InvalidSpec("n_samples must be nonnegative")
    if spec.proportions is None and spec.n_samples < N_CLASSES:
        raise InvalidSpec(f"need at least {N_CLASSES} samples for uniform proportions, got {spec.n_samples}")
    for name in ("delta", "sigma", "rho"):
        v = getattr(spec, name)
        if not 0.0 <= v <= 1.0:
            raise InvalidSpec(f"{name}={v!r} outside [0, 1]")
    if spec.seed < 0:
        raise InvalidSpec("seed must be nonnegative")


def _sample_stream(seed: int, index: int) -> np.random.Generator:
    # counter-based: sample i owns the counter block (*, i, 0, 0) under key=seed
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, index, 0, 0]))


def _draw_sample(spec: GeneratorSpec, cls: int, index: int):
    rng = _sample_stream(spec.seed, index)
    noise = rng.standard_normal(len(FEATURES))
    u = rng.random(8)
    x = MEAN_VECTOR + spec.sigma * noise
    ua = FEATURE_INDEX["unauthorized_access"]
    p_unauth = BASELINE_MEANS["unauthorized_access"]
    signs = iter(u[:3])
    for feat, mode, scale in CLASS_SHIFTS[cls]:
        j = FEATURE_INDEX[feat]
        if mode == "up":
            x[j] += scale * spec.delta
        elif mode == "down":
            x[j] -= scale * spec.delta
        elif mode == "pm":
            x[j] += (1.0 if next(signs) < 0.5 else -1.0) * scale * spec.delta
        elif mode == "bernoulli":
            p_unauth = UNAUTHORIZED_ATTACK_RATE
    if spec.binary_unauthorized:
        x[ua] = 1.0 if u[3] < p_unauth else 0.0
    elif p_unauth != BASELINE_MEANS["unauthorized_access"]:
        x[ua] += spec.delta
    l1 = l2 = int(cls != 0)
    if cls == 0 and u[4] < spec.rho:
        j = FEATURE_INDEX[LAYER1_FEATURES[min(int(u[5] * len(LAYER1_FEATURES)), len(LAYER1_FEATURES) - 1)]]
        x[j] += spec.delta / 2
        l1 = 1
    slice_id = min(int(u[6] * N_SLICES), N_SLICES - 1)
    return np.clip(x, 0.0, 1.0), l1, l2, slice_id


def generate_dataset(spec: GeneratorSpec = GeneratorSpec()) -> TelemetryDataset:
    """Deterministic labelled telemetry; sample ``i`` depends only on ``(seed, i)``."""
    _validate(spec)
    counts = spec.class_counts()
    labels = np.repeat(np.arange(N_CLASSES), counts)
    shuffle = np.random.Generator(np.random.Philox(key=spec.seed, counter=[0, 0, 0, 1]))
    labels = labels[shuffle.permutation(len(labels))]
    n = len(labels)
    feats = np.empty((n, len(FEATURES)))
    l1 = np.empty(n, dtype=int)
    l2 = np.empty(n, dtype=int)
    slices = np.empty(n, dtype=int)
    for i, cls in enumerate(labels):
        feats[i], l1[i], l2[i], slices[i] = _draw_sample(spec, int(cls), i)
    meta = {"source": "generated", "spec": spec.__dict__.copy()}
    return TelemetryDataset(feats, labels, l1, l2, np.arange(n), slices, np.arange(n), meta)


def class_prototypes(spec: GeneratorSpec = GeneratorSpec()) -> np.ndarray:
    """Noise-free class centres (random-sign shifts taken positive), shape (6, 23)."""
    protos = np.tile(MEAN_VECTOR, (N_CLASSES, 1))
    for cls, shifts in CLASS_SHIFTS.items():
        for feat, mode, scale in shifts:
            j = FEATURE_INDEX[feat]
            if mode == "bernoulli":
                protos[cls, j] = UNAUTHORIZED_ATTACK_RATE
            else:
                protos[cls, j] += (-1.0 if mode == "down" else 1.0) * scale * spec.delta
    return np.clip(protos, 0.0, 1.0)


# ---------------------------------------------------------------------------
# derived indicators and statistics
# ---------------------------------------------------------------------------

def interpretable_indicators(record: MasterTelemetryRecord) -> dict:
    mu = BASELINE_MEANS

    def dev(name):
        return abs(record[name] - mu[name])

    clip = lambda v: float(min(max(v, 0.0), 1.0))  # noqa: E731
    return {
        "dos_burstiness": clip(dev("throughput") + dev("prb_usage")),
        "spoofing_signal_deviation": clip((dev("rsrp") + dev("rsrq")) / 2),
        "replay_timing_offset": clip(dev("flow_interarrival_time")),
        "qos_violation_frequency": clip(record["jitter_index"] + record["packet_drop_rate"] - QOS_THRESHOLD),
        "slice_resource_deviation": clip(dev("prb_usage")),
    }


def dataset_stats(samples) -> dict:
    """Per-class feature means and population standard deviations."""
    if len(samples) == 0:
        raise EmptyDataset("no samples")
    if isinstance(samples, TelemetryDataset):
        feats, labels = samples.features, samples.attack_class
    else:
        feats = np.array([s.record.values for s in samples])
        labels = np.array([s.attack_class for s in samples])
    out = {}
    for cls in sorted(set(labels.tolist())):
        rows = feats[labels == cls]
        out[cls] = {"count": len(rows), "mean": rows.mean(axis=0), "std": rows.std(axis=0)}
    return out


# ---------------------------------------------------------------------------
# CSV interchange
# ---------------------------------------------------------------------------

LABEL_COLUMNS = ("attack_class", "l1_anomaly", "l2_intrusion", "slice_id", "timestamp")


def write_csv(dataset: TelemetryDataset, path) -> None:
    header = list(FEATURES) + list(LABEL_COLUMNS)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(len(dataset)):
            w.writerow([repr(float(v)) for v in dataset.features[i]]
                       + [int(dataset.attack_class[i]), int(dataset.l1_anomaly[i]),
                          int(dataset.l2_intrusion[i]), int(dataset.slice_id[i]), int(dataset.timestamp[i])])


def schema_columns(layer_schema) -> tuple:
    if layer_schema in ("full", "master", None):
        return FEATURES
    try:
        return LAYER_VIEWS[int(layer_schema)]
    except (KeyError, ValueError):
        raise InvalidLayer(f"unknown CSV schema {layer_schema!r}") from None


def load_csv(path, layer_schema="full", bounds: dict | None = None) -> TelemetryDataset:
    """Read telemetry rows and min-max scale each feature column to [0, 1].

    Column bounds come from the file itself unless ``bounds`` (as stored in a
    previous dataset's ``metadata["bounds"]``) is given. A constant column
    scales to 0.0. Features outside the chosen schema are left at 0.0.
    """
    required = schema_columns(layer_schema)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyFile(f"{path} is empty") from None
        pos = {h: i for i, h in enumerate(header)}
        # a layer-1 file may carry only the binary anomaly label
        if "attack_class" not in pos and required == LAYER1_FEATURES and "l1_anomaly" in pos:
            pos["attack_class"] = pos["l1_anomaly"]
        for col in required + ("attack_class",):
            if col not in pos:
                raise MissingColumn(col)
        raw, labels = [], {c: [] for c in LABEL_COLUMNS}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(lineno, f"expected {len(header)} fields, found {len(row)}")
            try:
                vals = [float(row[pos[c]]) for c in required]
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from None
            if not all(math.isfinite(v) for v in vals):
                raise ParseError(lineno, "non-finite feature value")
            raw.append(vals)
            for c in LABEL_COLUMNS:
                if c in pos:
                    try:
                        labels[c].append(int(row[pos[c]]))
                    except ValueError:
                        raise ParseError(lineno, f"{c} is not an integer: {row[pos[c]]!r}") from None
    n = len(raw)
    raw = np.array(raw, dtype=float).reshape(n, len(required))
    attack = np.array(labels["attack_class"], dtype=int)
    if n and (attack.min() < 0 or attack.max() >= N_CLASSES):
        bad = int(np.nonzero((attack < 0) | (attack >= N_CLASSES))[0][0])
        raise ParseError(bad + 2, f"attack_class outside 0..{N_CLASSES - 1}")
    for c in ("l1_anomaly", "l2_intrusion"):
        if c in pos and n and not set(labels[c]) <= {0, 1}:
            raise ParseError(2 + next(i for i, v in enumerate(labels[c]) if v not in (0, 1)), f"{c} must be 0 or 1")
    if bounds is None:
        lo = raw.min(axis=0) if n else np.zeros(len(required))
        hi = raw.max(axis=0) if n else np.ones(len(required))
        bounds = {c: (float(a), float(b)) for c, a, b in zip(required, lo, hi)}
    feats = np.zeros((n, len(FEATURES)))
    for j, c in enumerate(required):
        a, b = bounds[c]
        col = (raw[:, j] - a) / (b - a) if b > a else np.zeros(n)
        feats[:, FEATURE_INDEX[c]] = np.clip(col, 0.0, 1.0)
    opt = lambda c: np.array(labels[c], dtype=int) if c in pos else None  # noqa: E731
    meta = {"source": str(path), "schema": str(layer_schema), "columns": list(required), "bounds": bounds}
    return TelemetryDataset(feats, attack, opt("l1_anomaly"), opt("l2_intrusion"), None,
                            opt("slice_id"), opt("timestamp"), meta)
