"""Versioned JSON model files.

Every file is one JSON object::

    {"format": "hqdetect-model", "version": 1, "kind": "<mlp|rf|hybrid|constant>", ...}

Reals are written with Python's shortest round-trip ``repr`` so a save/load
cycle reproduces every float64 bit for bit. Random-forest trees are stored as
their flat node arrays. A hybrid file embeds its head and records the
encoding kind, feature width, circuit seed and the circuit's rotation angles.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .classical.forest import DecisionTree, RandomForestModel
from .classical.mlp import MlpModel
from .errors import ModelLoadError
from .hybrid import HybridModel, QuantumEncoder
from .pipeline import ConstantHead

FORMAT = "hqdetect-model"
VERSION = 1


def _mlp_to(m: MlpModel) -> dict:
    return {"kind": "mlp", "n_classes": m.n_classes, "seed": m.seed,
            "weights": [w.tolist() for w in m.weights], "biases": [b.tolist() for b in m.biases],
            "loss_history": list(map(float, m.loss_history))}


def _mlp_from(d: dict) -> MlpModel:
    ws = [np.array(w, dtype=float) for w in d["weights"]]
    bs = [np.array(b, dtype=float) for b in d["biases"]]
    return MlpModel(ws, bs, int(d["n_classes"]), int(d["seed"]), list(d.get("loss_history", [])))


def _rf_to(m: RandomForestModel) -> dict:
    trees = [{"feature": t.feature.tolist(), "threshold": t.threshold.tolist(), "left": t.left.tolist(),
              "right": t.right.tolist(), "counts": t.counts.tolist()} for t in m.trees]
    return {"kind": "rf", "n_classes": m.n_classes, "n_features": m.n_features,
            "max_depth": m.max_depth, "seed": m.seed, "trees": trees}


def _rf_from(d: dict) -> RandomForestModel:
    k = int(d["n_classes"])
    trees = [DecisionTree(np.array(t["feature"], dtype=int), np.array(t["threshold"], dtype=float),
                          np.array(t["left"], dtype=int), np.array(t["right"], dtype=int),
                          np.array(t["counts"], dtype=float).reshape(-1, k)) for t in d["trees"]]
    return RandomForestModel(trees, k, int(d["n_features"]), int(d["max_depth"]), int(d["seed"]))


def model_to_dict(model) -> dict:
    if isinstance(model, MlpModel):
        body = _mlp_to(model)
    elif isinstance(model, RandomForestModel):
        body = _rf_to(model)
    elif isinstance(model, ConstantHead):
        body = {"kind": "constant", "probs": model.probs.tolist()}
    elif isinstance(model, HybridModel):
        enc = model.encoder
        body = {"kind": "hybrid", "encoding": enc.config.kind, "feature_dim": enc.config.feature_dim,
                "circuit_seed": enc.seed, "angles": enc.circuit.parameters.tolist(),
                "composition": model.composition, "head": model_to_dict(model.head)}
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return {"format": FORMAT, "version": VERSION, **body}


def model_from_dict(d: dict):
    if not isinstance(d, dict) or d.get("format") != FORMAT:
        raise ModelLoadError("not an hqdetect model file")
    if d.get("version") != VERSION:
        raise ModelLoadError(f"unsupported model file version {d.get('version')!r}")
    kind = d.get("kind")
    try:
        if kind == "mlp":
            return _mlp_from(d)
        if kind == "rf":
            return _rf_from(d)
        if kind == "constant":
            return ConstantHead(d["probs"])
        if kind == "hybrid":
            enc = QuantumEncoder.build(d["encoding"], int(d["feature_dim"]), int(d["circuit_seed"]))
            if enc.circuit.parameters.size:
                enc = enc.with_parameters(d["angles"])
            return HybridModel(enc, model_from_dict(d["head"]), d["composition"])
    except ModelLoadError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelLoadError(f"corrupt {kind} model: {exc}") from None
    raise ModelLoadError(f"unknown model kind {kind!r}")


def save_model(model, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), separators=(",", ":")) + "\n", encoding="utf-8")


def load_model(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelLoadError(f"cannot read model file {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelLoadError(f"{path} is not valid JSON: {exc}") from None
    return model_from_dict(data)
