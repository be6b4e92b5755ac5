import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hqdetect.classical.metrics import confusion_matrix, metrics_from_cm, roc_auc
from hqdetect.errors import DegenerateLabels, EmptyMatrix, LabelOutOfRange, LengthMismatch


def labels_from_counts(tn, fp, fn, tp):
    t = [0] * (tn + fp) + [1] * (fn + tp)
    p = [0] * tn + [1] * fp + [0] * fn + [1] * tp
    return t, p


def test_confusion_from_paired_labels():
    t, p = labels_from_counts(1145, 23, 84, 1748)
    cm = confusion_matrix(t, p, 2)
    assert cm.tolist() == [[1145, 23], [84, 1748]]
    assert cm.total == 3000


def test_confusion_trivial_cases():
    assert np.array_equal(confusion_matrix([0, 1, 2, 2], [0, 1, 2, 2], 3).counts, np.diag([1, 1, 2]))
    assert confusion_matrix([], [], 4).counts.sum() == 0


def test_confusion_errors():
    with pytest.raises(LengthMismatch):
        confusion_matrix([0, 1], [0], 2)
    with pytest.raises(LabelOutOfRange):
        confusion_matrix([0, 2], [0, 1], 2)


def test_imperfect_binary_metrics():
    r = metrics_from_cm(np.array([[1145, 23], [84, 1748]]))
    assert abs(r.accuracy - 2893 / 3000) < 1e-12
    assert abs(r.precision[1] - 1748 / 1771) < 1e-12
    assert abs(r.recall[1] - 1748 / 1832) < 1e-12
    assert r.accuracy == pytest.approx(0.96433, abs=1e-5)


def test_perfect_binary_metrics():
    r = metrics_from_cm(np.array([[2229, 0], [0, 771]]))
    assert r.accuracy == 1.0
    assert r.precision == (1.0, 1.0) and r.recall == (1.0, 1.0) and r.f1 == (1.0, 1.0)


def test_all_wrong():
    r = metrics_from_cm(np.array([[0, 5], [7, 0]]))
    assert r.accuracy == 0.0 and r.f1 == (0.0, 0.0)


def test_zero_denominators_are_flagged():
    r = metrics_from_cm(np.array([[5, 0, 0], [2, 3, 0], [0, 0, 0]]))
    assert r.precision[2] == 0.0 and r.recall[2] == 0.0
    assert 2 in r.zero_division


def test_empty_matrix():
    with pytest.raises(EmptyMatrix):
        metrics_from_cm(np.zeros((2, 2), dtype=int))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.integers(0, 50), min_size=3, max_size=3), min_size=3, max_size=3))
def test_metric_identities(rows):
    c = np.array(rows)
    if c.sum() == 0:
        return
    r = metrics_from_cm(c)
    # micro recall: total true positives over total support
    assert np.trace(c) / c.sum() == r.accuracy
    n = np.array(r.support)
    assert abs(r.weighted_f1 - np.dot(n, r.f1) / n.sum()) < 1e-12


def test_auc_examples():
    assert roc_auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0
    assert roc_auc([0.9, 0.8, 0.2, 0.1], [0, 0, 1, 1]) == 0.0
    assert roc_auc([0.5] * 6, [0, 1, 0, 1, 1, 0]) == 0.5


def test_auc_degenerate():
    with pytest.raises(DegenerateLabels):
        roc_auc([0.1, 0.2], [1, 1])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 20), st.integers(0, 1)), min_size=2, max_size=40))
def test_auc_invariant_under_monotone_transform(pairs):
    s = np.array([p[0] for p in pairs], dtype=float)
    y = np.array([p[1] for p in pairs])
    if y.min() == y.max():
        return
    a = roc_auc(s, y)
    assert 0.0 <= a <= 1.0
    assert roc_auc(np.exp(s / 3) * 5 - 1, y) == a
