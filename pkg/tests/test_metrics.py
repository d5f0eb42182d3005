import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from databias import metrics
from databias.errors import EmptyPairSet, MissingClass, MissingClassInGroup, MissingGroup, NoPositivesInGroup

from oracles import brute_force_auc


def test_balanced_accuracy_examples():
    assert metrics.balanced_accuracy([1, 0, 1, 0], [1, 0, 1, 0]) == 1.0
    assert metrics.balanced_accuracy([1, 0, 1, 0], [1, 1, 1, 1]) == 0.5
    assert metrics.balanced_accuracy([1, 1, 0, 0], [1, 0, 0, 0]) == 0.75
    with pytest.raises(MissingClass):
        metrics.balanced_accuracy([1, 1], [1, 0])


def test_groupwise_tpr_and_eo():
    y = [1, 1, 1, 1]
    yhat = [1, 1, 1, 0]
    s = [1, 1, 0, 0]
    assert metrics.groupwise_tpr(y, yhat, s) == (1.0, 0.5)
    assert metrics.equal_opportunity(y, yhat, s) == 0.5
    assert metrics.equal_opportunity(y, yhat, [1 - v for v in s]) == -0.5
    assert metrics.equal_opportunity(y, y, s) == 0.0
    with pytest.raises(NoPositivesInGroup):
        metrics.groupwise_tpr([1, 1, 0], [1, 1, 0], [1, 1, 0])


def test_demographic_parity():
    s = [1, 1, 1, 1, 0, 0, 0, 0]
    assert metrics.demographic_parity([1, 1, 1, 0, 1, 0, 0, 0], s) == 0.5
    assert metrics.demographic_parity([1] * 8, s) == 0.0
    with pytest.raises(MissingGroup):
        metrics.demographic_parity([1, 0], [1, 1])


def test_pqp():
    y = [1, 0, 1, 0]
    s = [1, 1, 0, 0]
    assert metrics.prediction_quality_parity(y, [1, 0, 1, 1], s) == 0.5
    assert metrics.prediction_quality_parity(y, y, s) == 0.0
    with pytest.raises(MissingClassInGroup):
        metrics.prediction_quality_parity([1, 1, 1, 0], [1, 1, 1, 0], s)


@given(st.integers(0, 2**32 - 1))
def test_fairness_report_consistency(seed):
    rng = np.random.default_rng(seed)
    n = 40
    s = np.repeat([1, 0], n // 2)
    y = np.tile([1, 0], n // 2)
    yhat = rng.integers(0, 2, n)
    rep = metrics.fairness_report(y, yhat, s)
    assert rep.eo == rep.tpr_a - rep.tpr_d
    assert -1 <= rep.dp <= 1 and -1 <= rep.pqp <= 1 and 0 <= rep.balanced_accuracy <= 1
    # recompute from the confusion cells
    c = rep.counts
    tpr = {g: c[f"y=1,s={g}"]["tp"] / (c[f"y=1,s={g}"]["tp"] + c[f"y=1,s={g}"]["fn"]) for g in "ad"}
    tnr = {g: c[f"y=0,s={g}"]["tn"] / (c[f"y=0,s={g}"]["tn"] + c[f"y=0,s={g}"]["fp"]) for g in "ad"}
    assert rep.tpr_a == pytest.approx(tpr["a"]) and rep.tpr_d == pytest.approx(tpr["d"])
    ba = {g: (tpr[g] + tnr[g]) / 2 for g in "ad"}
    assert rep.pqp == pytest.approx(ba["a"] - ba["d"])
    # demographic parity ignores the labels
    assert metrics.demographic_parity(yhat, s) == metrics.fairness_report(rng.permutation(y), yhat, s).dp


# -- AUC family --------------------------------------------------------------------------

def test_auc_examples():
    assert metrics.auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0
    assert metrics.auc([0.3] * 4, [1, 0, 1, 0]) == 0.5
    assert metrics.auc([0.7, 0.2, 0.4, 0.6], [1, 1, 0, 0]) == 0.5
    with pytest.raises(MissingClass):
        metrics.auc([0.1, 0.2], [1, 1])


@settings(max_examples=200)
@given(st.lists(st.integers(0, 6), min_size=2, max_size=40), st.integers(0, 2**32 - 1))
def test_auc_equals_brute_force_with_ties(raw_scores, seed):
    rng = np.random.default_rng(seed)
    scores = np.asarray(raw_scores, dtype=float) / 6
    labels = rng.integers(0, 2, len(scores))
    labels[0], labels[1] = 1, 0
    fast = metrics.auc(scores, labels)
    assert fast == brute_force_auc(scores[labels == 1], scores[labels == 0])


@given(st.lists(st.integers(-50, 50), min_size=4, max_size=30), st.integers(0, 1000))
def test_auc_invariant_to_monotone_transform(scores, seed):
    # integer scores keep the strictly increasing transform exact, so no ties appear or vanish
    scores = np.asarray(scores, dtype=float)
    labels = np.random.default_rng(seed).integers(0, 2, len(scores))
    labels[:2] = [1, 0]
    assert metrics.auc(scores ** 3 + 2 * scores + 7, labels) == metrics.auc(scores, labels)


def test_xauc_examples():
    scores = np.array([0.9, 0.4, 0.5, 0.3])
    labels = np.array([1, 1, 0, 0])
    s = np.array([1, 1, 0, 0])
    assert metrics.xauc(scores, labels, s, "a", "d") == 0.75  # 3 of 4 cross pairs ordered
    assert metrics.xauc(scores, labels, s, None, None) == metrics.auc(scores, labels)
    assert metrics.xauc([1.0, 0.0], [1, 0], [1, 0], "a", "d") == 1.0
    with pytest.raises(EmptyPairSet):
        metrics.xauc(scores, labels, s, "d", "a")


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_xauc_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = 30
    scores = rng.integers(0, 5, n) / 4
    labels = np.tile([1, 0], n // 2)
    s = np.repeat([1, 0], n // 2)
    for g_from, g_to in (("a", "d"), ("d", "a")):
        pos = scores[(labels == 1) & (s == metrics.GROUPS[g_from])]
        neg = scores[(labels == 0) & (s == metrics.GROUPS[g_to])]
        assert metrics.xauc(scores, labels, s, g_from, g_to) == brute_force_auc(pos, neg)
