"""Gated three-stage detector: anomaly flag -> intrusion check -> attack class.

Layer 2 only runs on records Layer 1 flags, and Layer 3 only on records
Layer 2 confirms. Anything stopped early gets final label 0 (Normal).
"""
from __future__ import annotations

import hashlib
import json
import math
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .classical.forest import RandomForestModel
from .classical.mlp import MlpModel
from .errors import ArityMismatch, InvalidThreshold, NegativeWeight, OutOfRange, ShapeMismatch
from .hybrid import HybridModel
from .telemetry import N_CLASSES, MasterTelemetryRecord, TelemetryDataset, _view_indices

STAGES = ("L1-clear", "L1-flag", "L2-clear", "L3-classified")
SEVERITY_CUTS = (0.7, 0.9)  # low < 0.7 <= medium < 0.9 <= high
DEPTH_CAP = 32
OUTCOME_SCHEMA_VERSION = 1
_TRACE_DOMAIN = b"hqdetect-trace-v1\x00"


@dataclass(frozen=True)
class PipelineConfig:
    tau1: float = 0.5
    tau2: float = 0.5
    max_l1_to_l2_delay: int = 100
    lambdas: tuple = (1.0, 1.0, 1.0)  # per-layer latency weights
    lambda_interp: float = 0.1


class ConstantHead:
    """Stub head returning a fixed class distribution for every input."""

    def __init__(self, probs):
        p = np.asarray(probs, dtype=float).ravel()
        if p.size < 1 or np.any(p < 0) or not math.isclose(p.sum(), 1.0, abs_tol=1e-9):
            raise ValueError("ConstantHead needs a probability vector")
        self.probs = p
        self.n_classes = p.size
        self.n_features = None

    def predict_proba(self, X) -> np.ndarray:
        n = len(np.atleast_2d(np.asarray(X, dtype=float)))
        return np.tile(self.probs, (n, 1))

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


def _input_dim(head):
    if isinstance(head, HybridModel):
        return head.feature_dim
    return getattr(head, "n_features", None)


def head_depth(head) -> int:
    """Hidden-layer count (MLP) or deepest tree (RF); 0 for stubs."""
    inner = head.head if isinstance(head, HybridModel) else head
    if isinstance(inner, MlpModel):
        return inner.depth
    if isinstance(inner, RandomForestModel):
        return max(t.depth for t in inner.trees)
    return 0


def pqc_layers(head) -> int:
    return head.encoder.config.pqc_layers if isinstance(head, HybridModel) else 0


@dataclass(frozen=True, eq=False)
class Pipeline:
    l1: object
    l2: object
    l3: object
    config: PipelineConfig
    model_version: str = "0"


def _check_threshold(name, v):
    if not (isinstance(v, (int, float)) and 0.0 <= v <= 1.0):
        raise InvalidThreshold(f"{name}={v!r} must lie in [0, 1]")


def assemble_pipeline(l1_model, l2_model, l3_model, cfg: PipelineConfig = PipelineConfig(),
                      model_version: str = "0") -> Pipeline:
    _check_threshold("tau1", cfg.tau1)
    _check_threshold("tau2", cfg.tau2)
    if cfg.max_l1_to_l2_delay < 0:
        raise InvalidThreshold("max_l1_to_l2_delay must be nonnegative")
    for layer, head, k in ((1, l1_model, 2), (2, l2_model, 2), (3, l3_model, N_CLASSES)):
        if head.n_classes != k:
            raise ArityMismatch(f"layer {layer} head predicts {head.n_classes} classes, expected {k}")
        want = len(_view_indices(layer))
        got = _input_dim(head)
        if got is not None and got != want:
            raise ShapeMismatch(f"layer {layer} head takes {got} features, the layer view has {want}")
    return Pipeline(l1_model, l2_model, l3_model, cfg, str(model_version))


def severity_index(p2: float) -> str:
    if not (0.0 <= p2 <= 1.0):
        raise OutOfRange(f"probability {p2!r} outside [0, 1]")
    if p2 < SEVERITY_CUTS[0]:
        return "low"
    return "medium" if p2 < SEVERITY_CUTS[1] else "high"


def trace_id(record, model_version: str, label: int) -> str:
    """64-bit BLAKE2b digest (16 hex digits) of the features, model version and label."""
    values = record.values if isinstance(record, MasterTelemetryRecord) else np.asarray(record, dtype=float)
    h = hashlib.blake2b(digest_size=8)
    h.update(_TRACE_DOMAIN)
    h.update(np.ascontiguousarray(values, dtype="<f8").tobytes())
    h.update(str(model_version).encode("utf-8") + b"\x00")
    h.update(int(label).to_bytes(2, "little"))
    return h.hexdigest()


@dataclass(frozen=True)
class DetectionOutcome:
    stage: str
    l1: dict
    l2: dict | None
    l3: dict | None
    final_label: int
    sample_id: int = 0

    @property
    def stale(self) -> bool:
        return bool(self.l2 and self.l2.get("stale"))

    def to_dict(self) -> dict:
        return {
            "schema_version": OUTCOME_SCHEMA_VERSION,
            "sample_id": self.sample_id,
            "stage": self.stage,
            "l1": self.l1,
            "l2": self.l2,
            "l3": self.l3,
            "final_label": self.final_label,
        }


def _proba(head, X, layer):
    X = np.atleast_2d(X)
    if len(X) == 0:
        return np.zeros((0, head.n_classes))
    return head.predict_proba(X)


def classify_views(pipeline: Pipeline, records: list, l2_ticks=None) -> list:
    """Classify many records; heads run once per stage on the rows that reach it."""
    cfg = pipeline.config
    n = len(records)
    if n == 0:
        return []
    feats = np.array([r.values for r in records])
    ticks = [None] * n if l2_ticks is None else list(l2_ticks)
    p1 = _proba(pipeline.l1, feats[:, _view_indices(1)], 1)[:, 1]
    flagged = np.nonzero(p1 >= cfg.tau1)[0]
    fresh = [i for i in flagged
             if ticks[i] is None or ticks[i] <= records[i].timestamp + cfg.max_l1_to_l2_delay]
    p2 = np.full(n, np.nan)
    if fresh:
        p2[fresh] = _proba(pipeline.l2, feats[np.ix_(fresh, _view_indices(2))], 2)[:, 1]
    confirmed = [i for i in fresh if p2[i] >= cfg.tau2]
    p3 = {}
    if confirmed:
        probs = _proba(pipeline.l3, feats[np.ix_(confirmed, _view_indices(3))], 3)
        p3 = dict(zip(confirmed, probs))
    fresh_set = set(fresh)
    out = []
    for i, rec in enumerate(records):
        l1 = {"flag": int(p1[i] >= cfg.tau1), "probability": float(p1[i]),
              "timestamp": int(rec.timestamp), "slice_id": int(rec.slice_id)}
        if not l1["flag"]:
            out.append(DetectionOutcome("L1-clear", l1, None, None, 0, int(rec.sample_id)))
            continue
        if i not in fresh_set:
            l2 = {"intrusion": 0, "probability": None, "severity": None, "stale": True}
            out.append(DetectionOutcome("L2-clear", l1, l2, None, 0, int(rec.sample_id)))
            continue
        l2 = {"intrusion": int(p2[i] >= cfg.tau2), "probability": float(p2[i]),
              "severity": severity_index(float(p2[i])), "stale": False}
        if not l2["intrusion"]:
            out.append(DetectionOutcome("L2-clear", l1, l2, None, 0, int(rec.sample_id)))
            continue
        probs = p3[i]
        label = int(np.argmax(probs))
        l3 = {"attack_class": label, "confidence": float(probs[label]),
              "trace_id": trace_id(rec, pipeline.model_version, label)}
        out.append(DetectionOutcome("L3-classified", l1, l2, l3, label, int(rec.sample_id)))
    return out


def classify(pipeline: Pipeline, record: MasterTelemetryRecord, l2_tick: int | None = None) -> DetectionOutcome:
    """Run the gated cascade on one record.

    ``l2_tick`` is when Layer 2 evaluates the record; if it is later than the
    Layer-1 timestamp plus ``max_l1_to_l2_delay`` the flag is treated as stale
    and the record ends at L2-clear.
    """
    return classify_views(pipeline, [record], None if l2_tick is None else [l2_tick])[0]


def classify_dataset(pipeline: Pipeline, dataset: TelemetryDataset) -> list:
    return classify_views(pipeline, [dataset.record(i) for i in range(len(dataset))])


def stage_counts(outcomes) -> dict:
    counts = {s: 0 for s in STAGES}
    for o in outcomes:
        counts[o.stage] += 1
    return counts


def write_outcomes(outcomes, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for o in outcomes:
            fh.write(json.dumps(o.to_dict(), separators=(",", ":")) + "\n")


# ---------------------------------------------------------------------------
# composite objective
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompositeObjective:
    losses: tuple
    latencies: tuple
    interpretability: float
    total: float

    def to_dict(self) -> dict:
        return {"losses": list(self.losses), "latencies": list(self.latencies),
                "interpretability": self.interpretability, "total": self.total}


def interpretability_cost(l3_model) -> float:
    """(PQC block count + head depth) / DEPTH_CAP."""
    return (pqc_layers(l3_model) + head_depth(l3_model)) / DEPTH_CAP


def composite_objective(losses, latencies, l3_model=None, cfg: PipelineConfig = PipelineConfig(),
                        interpretability: float | None = None) -> CompositeObjective:
    """sum_l (loss_l + lambda_l * latency_l) + lambda_interp * I, reported only."""
    losses = tuple(float(v) for v in losses)
    latencies = tuple(float(v) for v in latencies)
    lambdas = tuple(float(v) for v in cfg.lambdas)
    if any(v < 0 for v in lambdas) or cfg.lambda_interp < 0:
        raise NegativeWeight("objective weights must be nonnegative")
    if not len(losses) == len(latencies) == len(lambdas):
        raise ShapeMismatch("need one loss, latency and weight per layer")
    interp = float(interpretability if interpretability is not None
                   else (interpretability_cost(l3_model) if l3_model is not None else 0.0))
    total = sum(l + w * t for l, w, t in zip(losses, lambdas, latencies)) + cfg.lambda_interp * interp
    return CompositeObjective(losses, latencies, interp, float(total))


def measure_latency(fn, repeats: int = 5) -> float:
    """Median wall-clock seconds of ``fn()`` over ``repeats`` runs."""
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def layer_latencies(pipeline: Pipeline, dataset: TelemetryDataset, repeats: int = 5) -> tuple:
    """Median per-layer inference time over the whole dataset (each head on its own view)."""
    heads = (pipeline.l1, pipeline.l2, pipeline.l3)
    return tuple(measure_latency(lambda h=h, v=v: _proba(h, dataset.view(v), v), repeats)
                 for v, h in zip((1, 2, 3), heads))
