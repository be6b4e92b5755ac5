import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hqdetect.errors import EmptyDataset, EmptyFile, InvalidLayer, InvalidSpec, MissingColumn, ParseError
from hqdetect.telemetry import (
    BASELINE_MEANS,
    CLASS_SHIFTS,
    FEATURE_INDEX,
    FEATURES,
    LAYER1_FEATURES,
    GeneratorSpec,
    MasterTelemetryRecord,
    class_prototypes,
    dataset_stats,
    generate_dataset,
    interpretable_indicators,
    load_csv,
    project_layer_view,
    write_csv,
)


@pytest.fixture(scope="module")
def big():
    return generate_dataset(GeneratorSpec(n_samples=10000, seed=0))


def test_balanced_partition():
    ds = generate_dataset(GeneratorSpec(n_samples=600, seed=1))
    assert ds.class_counts() == [100] * 6


def test_proportions_use_largest_remainder():
    spec = GeneratorSpec(n_samples=10, proportions=(0.5, 0.1, 0.1, 0.1, 0.1, 0.1))
    assert spec.class_counts() == [5, 1, 1, 1, 1, 1]
    assert sum(GeneratorSpec(n_samples=7, proportions=(1, 1, 1, 0, 0, 0)).class_counts()) == 7


def test_same_seed_bit_identical_and_seed_matters():
    a = generate_dataset(GeneratorSpec(n_samples=120, seed=5))
    b = generate_dataset(GeneratorSpec(n_samples=120, seed=5))
    c = generate_dataset(GeneratorSpec(n_samples=120, seed=6))
    assert a.features.tobytes() == b.features.tobytes()
    assert np.array_equal(a.attack_class, b.attack_class)
    assert not np.array_equal(a.features, c.features)


def test_invalid_specs():
    with pytest.raises(InvalidSpec):
        generate_dataset(GeneratorSpec(n_samples=5))
    with pytest.raises(InvalidSpec):
        generate_dataset(GeneratorSpec(n_samples=60, delta=1.5))
    with pytest.raises(InvalidSpec):
        generate_dataset(GeneratorSpec(n_samples=60, rho=-0.1))


def test_label_chain_and_range(big):
    attack = big.attack_class != 0
    assert np.all(big.l1_anomaly[attack] == 1) and np.all(big.l2_intrusion[attack] == 1)
    assert np.all(big.l2_intrusion[~attack] == 0)
    assert big.features.min() >= 0.0 and big.features.max() <= 1.0
    # the benign-anomaly path exists at the configured rate
    benign = np.mean(big.l1_anomaly[~attack])
    assert abs(benign - 0.05) < 0.02


def test_dos_connection_rate_shift(big):
    stats = dataset_stats(big)
    j = FEATURE_INDEX["connection_request_rate"]
    assert stats[1]["mean"][j] - stats[0]["mean"][j] >= 0.15


def test_every_attack_class_separates(big):
    stats = dataset_stats(big)
    delta = 0.3
    for cls in range(1, 6):
        best = -np.inf
        for feat, _, _ in CLASS_SHIFTS[cls]:
            j = FEATURE_INDEX[feat]
            a, b = stats[cls], stats[0]
            se = math.sqrt(a["std"][j] ** 2 / a["count"] + b["std"][j] ** 2 / b["count"])
            best = max(best, abs(a["mean"][j] - b["mean"][j]) + 5 * se)
        assert best >= delta / 2


def test_mean_separation_matches_delta():
    ds = generate_dataset(GeneratorSpec(n_samples=6000, seed=2, rho=0.0))
    stats = dataset_stats(ds)
    sigma = 0.08
    for feat in ("connection_request_rate", "throughput", "harq_retransmission_count"):
        j = FEATURE_INDEX[feat]
        diff = stats[1]["mean"][j] - stats[0]["mean"][j]
        tol = 3 * sigma * math.sqrt(2 / 1000)
        assert abs(diff - 0.3) <= tol


def test_layer_views():
    rec = MasterTelemetryRecord(np.arange(23) / 23)
    assert project_layer_view(rec, 1).shape == (6,)
    assert project_layer_view(rec, 2).shape == (6,)
    v3 = project_layer_view(rec, 3)
    assert v3.shape == (11,)
    assert v3[0] == rec["rsrp"]
    with pytest.raises(InvalidLayer):
        project_layer_view(rec, 4)


def test_indicators_at_baseline_are_zero():
    rec = MasterTelemetryRecord([BASELINE_MEANS[f] for f in FEATURES])
    ind = interpretable_indicators(rec)
    assert set(ind) == {"dos_burstiness", "spoofing_signal_deviation", "replay_timing_offset",
                        "qos_violation_frequency", "slice_resource_deviation"}
    assert all(v == 0.0 for v in ind.values())


def test_dos_prototype_has_burstiness():
    assert interpretable_indicators(MasterTelemetryRecord(class_prototypes()[1]))["dos_burstiness"] > 0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=23, max_size=23))
def test_indicators_in_unit_interval(values):
    assert all(0.0 <= v <= 1.0 for v in interpretable_indicators(MasterTelemetryRecord(values)).values())


def test_stats_trivial_cases():
    ds = generate_dataset(GeneratorSpec(n_samples=6, seed=0))
    one = ds.subset([0])
    s = dataset_stats(one)
    (cls,) = s
    assert np.array_equal(s[cls]["mean"], one.features[0])
    assert np.all(s[cls]["std"] == 0)
    twice = ds.subset([0, 0])
    assert np.all(dataset_stats(twice)[cls]["std"] == 0)
    with pytest.raises(EmptyDataset):
        dataset_stats(ds.subset([]))


# -- CSV ---------------------------------------------------------------------

def test_csv_round_trip(tmp_path):
    ds = generate_dataset(GeneratorSpec(n_samples=30, seed=3))
    p = tmp_path / "t.csv"
    write_csv(ds, p)
    back = load_csv(p, bounds={f: (0.0, 1.0) for f in FEATURES})
    np.testing.assert_array_equal(back.features, ds.features)
    np.testing.assert_array_equal(back.attack_class, ds.attack_class)
    np.testing.assert_array_equal(back.l1_anomaly, ds.l1_anomaly)


def _write_layer1(path, rows, drop=None):
    cols = [c for c in LAYER1_FEATURES if c != drop] + ["l1_anomaly"]
    lines = [",".join(cols)] + [",".join(map(str, r)) for r in rows]
    path.write_text("\n".join(lines) + "\n")


def test_layer1_csv_three_rows(tmp_path):
    p = tmp_path / "l1.csv"
    _write_layer1(p, [[1, 2, 3, 4, 5, 6, 0], [3, 2, 5, 4, 9, 6, 1], [2, 2, 4, 4, 7, 6, 1]])
    ds = load_csv(p, 1)
    assert len(ds) == 3
    v = ds.view(1)
    np.testing.assert_allclose(v[:, 0], [0.0, 1.0, 0.5])
    # constant columns collapse to zero
    assert np.all(v[:, 1] == 0.0) and np.all(v[:, 3] == 0.0)
    assert ds.metadata["bounds"]["connection_request_rate"] == (1.0, 3.0)
    np.testing.assert_array_equal(ds.labels(1), [0, 1, 1])


def test_csv_missing_column(tmp_path):
    p = tmp_path / "bad.csv"
    _write_layer1(p, [[1, 2, 3, 4, 5, 0]], drop="mobility_index")
    with pytest.raises(MissingColumn) as err:
        load_csv(p, 1)
    assert "mobility_index" in str(err.value)


def test_csv_parse_error_reports_line(tmp_path):
    p = tmp_path / "bad.csv"
    _write_layer1(p, [[1, 2, 3, 4, 5, 6, 0], [1, "x", 3, 4, 5, 6, 0]])
    with pytest.raises(ParseError) as err:
        load_csv(p, 1)
    assert err.value.row == 3


def test_csv_empty_file(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(EmptyFile):
        load_csv(p)
