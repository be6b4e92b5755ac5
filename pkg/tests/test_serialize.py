import json

import numpy as np
import pytest

from hqdetect.classical.forest import RfConfig, train_rf
from hqdetect.classical.mlp import MlpConfig, train_mlp
from hqdetect.errors import ModelLoadError
from hqdetect.hybrid import HybridConfig, train_hybrid
from hqdetect.pipeline import ConstantHead
from hqdetect.serialize import load_model, model_to_dict, save_model


@pytest.fixture
def data():
    rng = np.random.default_rng(0)
    X = rng.random((60, 6))
    return X, (X[:, 0] > 0.5).astype(int)


def _roundtrip(model, tmp_path):
    p = tmp_path / "m.json"
    save_model(model, p)
    return load_model(p)


def test_mlp_roundtrip(data, tmp_path):
    X, y = data
    m = train_mlp(X, y, MlpConfig(epochs=3))
    back = _roundtrip(m, tmp_path)
    assert back.predict_proba(X).tobytes() == m.predict_proba(X).tobytes()


def test_rf_roundtrip(data, tmp_path):
    X, y = data
    m = train_rf(X, y, RfConfig(tree_count=5))
    assert np.array_equal(_roundtrip(m, tmp_path).votes(X), m.votes(X))


@pytest.mark.parametrize("enc", ["none", "full", "amplitude3"])
def test_hybrid_roundtrip(enc, data, tmp_path):
    X, y = data
    m = train_hybrid(X, y, HybridConfig(enc, "parallel", "rf", rf=RfConfig(tree_count=4)))
    back = _roundtrip(m, tmp_path)
    assert back.composition == "parallel"
    assert back.predict_proba(X).tobytes() == m.predict_proba(X).tobytes()


def test_constant_roundtrip(tmp_path):
    back = _roundtrip(ConstantHead([0.25, 0.75]), tmp_path)
    np.testing.assert_array_equal(back.probs, [0.25, 0.75])


def test_file_is_versioned():
    d = model_to_dict(ConstantHead([1.0, 0.0]))
    assert d["format"] == "hqdetect-model" and d["version"] == 1 and d["kind"] == "constant"


def test_load_errors(tmp_path):
    with pytest.raises(ModelLoadError):
        load_model(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ModelLoadError):
        load_model(bad)
    bad.write_text(json.dumps({"format": "hqdetect-model", "version": 99, "kind": "rf"}))
    with pytest.raises(ModelLoadError):
        load_model(bad)
    bad.write_text(json.dumps({"format": "hqdetect-model", "version": 1, "kind": "rf"}))
    with pytest.raises(ModelLoadError):
        load_model(bad)
