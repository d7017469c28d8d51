import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from builders import paired
from ordinaldet.matching import match_greedy
from ordinaldet.ordinal_metrics import (
    UndefinedMetricError,
    confusion,
    gap_histogram,
    maoe,
    ordinal_scores,
    ordinal_top_k,
)


def matches_for(pred, true):
    ds, preds = paired(pred, true)
    return match_greedy(ds, preds, 0.5, class_aware=False)


def test_exact_predictions():
    m = matches_for([0, 1, 2, 3, 4], [0, 1, 2, 3, 4])
    assert maoe(m) == 0.0
    assert ordinal_top_k(m, 0) == 1.0


def test_hand_fixture():
    m = matches_for([0, 2, 4], [1, 2, 2])
    assert maoe(m) == 1.0
    assert ordinal_top_k(m, 1) == pytest.approx(2 / 3, abs=1e-15)
    assert ordinal_top_k(m, 0) == pytest.approx(1 / 3, abs=1e-15)
    assert ordinal_top_k(m, 2) == 1.0
    counts = confusion(m).counts
    assert counts[1].tolist() == [1, 0, 0, 0, 0]
    assert counts[2].tolist() == [0, 0, 1, 0, 1]


def test_maximal_distance():
    assert maoe(matches_for([0], [4])) == 4.0


def test_top4_saturates():
    m = matches_for([0, 4, 2, 1], [4, 0, 3, 1])
    assert ordinal_top_k(m, 4) == 1.0


def test_no_matches_is_undefined_not_zero():
    m = matches_for([], [])
    with pytest.raises(UndefinedMetricError):
        maoe(m)
    with pytest.raises(UndefinedMetricError):
        ordinal_top_k(m, 1)
    scores = ordinal_scores(m)
    assert scores.maoe is None
    assert scores.top_k_accuracy[1] is None
    assert scores.matched_count == 0


def test_confusion_identity_and_constant_predictor():
    perfect = confusion(matches_for([0, 1, 2, 3, 4], [0, 1, 2, 3, 4]))
    assert np.array_equal(perfect.row_normalized, np.eye(5))
    collapsed = confusion(matches_for([0] * 5, [0, 1, 2, 3, 4]))
    assert collapsed.counts[:, 1:].sum() == 0
    assert collapsed.counts[:, 0].sum() == 5


def test_empty_rows_flagged():
    cm = confusion(matches_for([1, 1], [1, 3]))
    assert cm.empty_rows == (0, 2, 4)
    assert cm.row_normalized[0].tolist() == [0.0] * 5
    assert cm.row_normalized[3].tolist() == [0.0, 1.0, 0.0, 0.0, 0.0]


def test_confusion_csv():
    text = confusion(matches_for([0, 2, 4], [1, 2, 2])).to_csv()
    lines = text.splitlines()
    assert lines[0] == "true\\pred,DS0,DS1,DS2,DS3,DS4"
    assert lines[3] == "DS2,0,0,1,0,1"
    assert len(lines) == 6


def test_match_rate_counts_unmatched_ground_truth():
    ds, preds = paired([2, 2], [2, 2])
    preds = type(preds)(preds.detections[:1])
    scores = ordinal_scores(match_greedy(ds, preds, 0.5))
    assert scores.match_rate == 0.5
    assert scores.unmatched_ground_truth == 1


pairs = st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=40)


@given(pairs)
def test_top_k_monotone_and_maoe_identity(items):
    m = matches_for([p for p, _ in items], [t for _, t in items])
    tops = [ordinal_top_k(m, k) for k in range(5)]
    assert tops == sorted(tops)
    assert tops[4] == 1.0
    hist = gap_histogram(m)
    n = len(items)
    assert maoe(m) == pytest.approx(sum(d * hist[d] / n for d in range(1, 5)), abs=1e-12)
    # direct computation
    assert maoe(m) == pytest.approx(sum(abs(p - t) for p, t in items) / n, abs=1e-12)
    assert 0.0 <= maoe(m) <= 4.0


@given(pairs)
def test_row_normalized_sums(items):
    cm = confusion(matches_for([p for p, _ in items], [t for _, t in items]))
    for k in range(5):
        total = cm.row_normalized[k].sum()
        assert total == pytest.approx(0.0 if k in cm.empty_rows else 1.0, abs=1e-12)
