"""Performance, fairness and ranking metrics.

Groups are encoded with ``s=1`` for the advantaged group and ``s=0`` for the
disadvantaged one; labels with ``1`` for the positive class. Every metric
raises a typed :class:`~databias.errors.MetricError` when it is undefined
instead of returning a silent default.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import EmptyPairSet, MissingClass, MissingClassInGroup, MissingGroup, NoPositivesInGroup

GROUPS = {"a": 1, "d": 0}


def _rates(y, yhat):
    pos = y == 1
    neg = ~pos
    if not pos.any() or not neg.any():
        raise MissingClass("both classes must be present")
    return float(np.mean(yhat[pos] == 1)), float(np.mean(yhat[neg] == 0))


def balanced_accuracy(y, yhat) -> float:
    tpr, tnr = _rates(np.asarray(y), np.asarray(yhat))
    return (tpr + tnr) / 2


def groupwise_tpr(y, yhat, s) -> tuple[float, float]:
    """True positive rates ``(tpr_a, tpr_d)``."""
    y, yhat, s = np.asarray(y), np.asarray(yhat), np.asarray(s)
    out = []
    for g in (1, 0):
        mask = (s == g) & (y == 1)
        if not mask.any():
            raise NoPositivesInGroup(f"group {'a' if g else 'd'} has no positives")
        out.append(float(np.mean(yhat[mask] == 1)))
    return out[0], out[1]


def demographic_parity(yhat, s) -> float:
    yhat, s = np.asarray(yhat), np.asarray(s)
    if not (s == 1).any() or not (s == 0).any():
        raise MissingGroup("both groups must be present")
    return float(np.mean(yhat[s == 1] == 1) - np.mean(yhat[s == 0] == 1))


def equal_opportunity(y, yhat, s) -> float:
    tpr_a, tpr_d = groupwise_tpr(y, yhat, s)
    return tpr_a - tpr_d


def prediction_quality_parity(y, yhat, s) -> float:
    """Balanced accuracy on the advantaged group minus that on the disadvantaged one."""
    y, yhat, s = np.asarray(y), np.asarray(yhat), np.asarray(s)
    ba = []
    for g in (1, 0):
        mask = s == g
        try:
            ba.append(balanced_accuracy(y[mask], yhat[mask]))
        except MissingClass:
            raise MissingClassInGroup(f"group {'a' if g else 'd'} lacks a class") from None
    return ba[0] - ba[1]


@dataclass(frozen=True)
class FairnessReport:
    balanced_accuracy: float
    tpr_a: float
    tpr_d: float
    dp: float
    eo: float
    pqp: float
    counts: dict  # "y=1,s=a" -> {"tp": .., "fn": ..} / {"tn": .., "fp": ..}

    def to_dict(self) -> dict:
        return asdict(self)


def confusion_cells(y, yhat, s) -> dict:
    y, yhat, s = np.asarray(y), np.asarray(yhat), np.asarray(s)
    cells = {}
    for g, label in ((1, "a"), (0, "d")):
        for cls in (1, 0):
            mask = (s == g) & (y == cls)
            hits = int(np.sum(yhat[mask] == cls))
            misses = int(mask.sum()) - hits
            if cls == 1:
                cells[f"y=1,s={label}"] = {"tp": hits, "fn": misses}
            else:
                cells[f"y=0,s={label}"] = {"tn": hits, "fp": misses}
    return cells


def fairness_report(y, yhat, s) -> FairnessReport:
    tpr_a, tpr_d = groupwise_tpr(y, yhat, s)
    return FairnessReport(
        balanced_accuracy=balanced_accuracy(y, yhat),
        tpr_a=tpr_a,
        tpr_d=tpr_d,
        dp=demographic_parity(yhat, s),
        eo=tpr_a - tpr_d,
        pqp=prediction_quality_parity(y, yhat, s),
        counts=confusion_cells(y, yhat, s),
    )


# -- ranking ---------------------------------------------------------------------

def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    boundaries = np.flatnonzero(np.diff(sorted_vals)) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [values.size]])
    # tied block occupying 0-based positions [start, end) gets rank (start + end + 1) / 2
    block_rank = (starts + ends + 1) / 2.0
    ranks = np.empty(values.size)
    ranks[order] = np.repeat(block_rank, ends - starts)
    return ranks


def pairwise_auc(pos_scores, neg_scores) -> float:
    """Pr(pos > neg) over all pairs, ties counted as one half."""
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise EmptyPairSet("need at least one positive and one negative")
    ranks = _midranks(np.concatenate([pos, neg]))
    u = ranks[:pos.size].sum() - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


def auc(scores, labels) -> float:
    scores, labels = np.asarray(scores, dtype=np.float64), np.asarray(labels)
    if not (labels == 1).any() or not (labels == 0).any():
        raise MissingClass("AUC needs both classes")
    return pairwise_auc(scores[labels == 1], scores[labels == 0])


def _group_mask(s, group):
    if group is None:
        return np.ones(len(s), dtype=bool)
    return np.asarray(s) == GROUPS.get(group, group)


def xauc(scores, labels, s, from_group, to_group) -> float:
    """Probability that a positive of ``from_group`` outranks a negative of ``to_group``.

    Groups are ``"a"``, ``"d"`` or ``None`` for the whole population.
    """
    scores, labels = np.asarray(scores, dtype=np.float64), np.asarray(labels)
    pos = scores[(labels == 1) & _group_mask(s, from_group)]
    neg = scores[(labels == 0) & _group_mask(s, to_group)]
    if pos.size == 0 or neg.size == 0:
        raise EmptyPairSet(f"no positives in {from_group!r} or no negatives in {to_group!r}")
    return pairwise_auc(pos, neg)
