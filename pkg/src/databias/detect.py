"""Bias detection measures and Data Bias Profiles.

All measures are computed from the practitioner's own data: a classifier is
trained on one part of the dataset and evaluated on an identically
distributed held-out part.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import metrics
from .data import EncodedMatrix, TabularDataset, encode, fit_encoder, stratified_split
from .errors import MetricError, MissingClassInGroup, MissingGroup, ProfileError, SchemaMismatch
from .model import TrainConfig, predict_proba, train

DBP_VERSION = "dbp-v1"
PROFILE_MEASURES = ("rd", "delta_xauc", "delta_wauc", "sd", "sauc")


def representation_difference(s) -> float:
    """Pr(s=a) - Pr(s=d)."""
    s = np.asarray(s)
    if s.size == 0:
        raise ValueError("RD needs at least one row")
    n_a = int(np.count_nonzero(s == 1))
    return (n_a - (s.size - n_a)) / s.size


def delta_xauc(scores, labels, s) -> float:
    return metrics.xauc(scores, labels, s, "a", "d") - metrics.xauc(scores, labels, s, "d", "a")


def delta_wauc(scores, labels, s) -> float:
    scores, labels, s = np.asarray(scores), np.asarray(labels), np.asarray(s)
    within = []
    for g in (1, 0):
        mask = s == g
        try:
            within.append(metrics.auc(scores[mask], labels[mask]))
        except metrics.MissingClass:
            raise MissingClassInGroup(f"group {'a' if g else 'd'} lacks a class") from None
    return within[0] - within[1]


def separation_difference(scores, labels, s) -> float:
    return (delta_xauc(scores, labels, s) + delta_wauc(scores, labels, s)) / 2


def _require_groups(s, where):
    s = np.asarray(s)
    if not (s == 1).any() or not (s == 0).any():
        raise MissingGroup(f"both groups must be present in the {where} part")


def sensitive_auc(train_part: EncodedMatrix, eval_part: EncodedMatrix,
                  config: TrainConfig = TrainConfig()) -> float:
    """AUC of a classifier predicting membership of group a from the features.

    The classifier is fitted on ``train_part`` and scored on ``eval_part``.
    """
    _require_groups(train_part.s, "training")
    _require_groups(eval_part.s, "evaluation")
    h = train(train_part.features, train_part.s, config)
    return metrics.auc(predict_proba(h, eval_part.features), eval_part.s)


def label_scores(train_part: EncodedMatrix, eval_part: EncodedMatrix,
                 config: TrainConfig = TrainConfig()) -> np.ndarray:
    g = train(train_part.features, train_part.y, config)
    return predict_proba(g, eval_part.features)


@dataclass(frozen=True)
class DataBiasProfile:
    dataset_id: str
    sensitive_name: str
    rd: float
    delta_xauc: float
    delta_wauc: float
    sauc: float
    model_config_digest: str
    seed: int
    split_fractions: tuple = (0.8, 0.1, 0.1)
    created_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    sd: float = float("nan")

    def __post_init__(self):
        object.__setattr__(self, "sd", (self.delta_xauc + self.delta_wauc) / 2)
        object.__setattr__(self, "split_fractions", tuple(self.split_fractions))

    def to_dict(self) -> dict:
        out = {"version": DBP_VERSION}
        out.update(asdict(self))
        out["split_fractions"] = list(self.split_fractions)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, obj: dict) -> "DataBiasProfile":
        version = obj.get("version")
        if version != DBP_VERSION:
            raise SchemaMismatch(f"profile version {version!r} is not {DBP_VERSION!r}")
        body = {k: v for k, v in obj.items() if k not in ("version", "sd")}
        expected = {f for f in cls.__dataclass_fields__} - {"sd"}
        if set(body) != expected:
            missing, extra = expected - set(body), set(body) - expected
            raise SchemaMismatch(f"profile fields differ: missing {sorted(missing)}, unknown {sorted(extra)}")
        # sd is always recomputed from its components
        return cls(**body)


def _measure(name, fn, *args):
    try:
        return fn(*args)
    except (MetricError, ValueError) as exc:
        raise ProfileError(name, exc) from exc


def build_profile(dataset: TabularDataset, sensitive_name: str | None = None,
                  config: TrainConfig = TrainConfig(), seed: int = 0,
                  fractions=(0.8, 0.1, 0.1), dataset_id: str | None = None) -> DataBiasProfile:
    """Compute RD on the whole dataset and SD/sAUC on a held-out split.

    Both classifiers are fitted on the training part; the test part is used
    for evaluation and the validation part is left unused.
    """
    if sensitive_name is not None and sensitive_name != dataset.sensitive.name:
        raise SchemaMismatch(
            f"dataset sensitive column is {dataset.sensitive.name!r}, not {sensitive_name!r}")
    config = config.with_seed(seed)
    split = stratified_split(dataset, fractions, seed)
    encoder = fit_encoder(dataset, split.train)
    full = encode(dataset, encoder)
    tr, ev = full.rows(split.train), full.rows(split.test)
    rd = _measure("rd", representation_difference, dataset.s)
    scores = _measure("label classifier", label_scores, tr, ev, config)
    dx = _measure("delta_xauc", delta_xauc, scores, ev.y, ev.s)
    dw = _measure("delta_wauc", delta_wauc, scores, ev.y, ev.s)
    sauc = _measure("sauc", sensitive_auc, tr, ev, config)
    return DataBiasProfile(
        dataset_id=dataset_id or dataset.name,
        sensitive_name=dataset.sensitive.name,
        rd=rd, delta_xauc=dx, delta_wauc=dw, sauc=sauc,
        model_config_digest=f"{config.model_kind}:{config.digest()}",
        seed=seed, split_fractions=tuple(fractions),
    )


DEFAULT_THRESHOLDS = {"sauc": 0.2, "sd": 0.05, "rd": 0.2}

_LABELS = {
    "sauc": ("stronger-proxy", "weaker-proxy"),
    "sd": ("more-label-bias", "less-label-bias"),
    "rd": ("more-underrepresentation", "less-underrepresentation"),
}


def compare_profiles(p1: DataBiasProfile, p2: DataBiasProfile, thresholds: dict | None = None) -> dict:
    """Signed differences ``p1 - p2`` per measure and a coarse classification.

    Thresholds are arbitrary defaults for ranking datasets against each other;
    they do not certify a bias as mild or excessive.
    """
    if not isinstance(p1, DataBiasProfile) or not isinstance(p2, DataBiasProfile):
        raise SchemaMismatch("compare_profiles expects two DataBiasProfile objects")
    limits = dict(DEFAULT_THRESHOLDS)
    limits.update(thresholds or {})
    diff = {m: getattr(p1, m) - getattr(p2, m) for m in PROFILE_MEASURES}
    labels = []
    for measure, (above, below) in _LABELS.items():
        gap = diff[measure]
        if gap > limits[measure]:
            labels.append(above)
        elif gap < -limits[measure]:
            labels.append(below)
    return {
        "version": DBP_VERSION,
        "profiles": [p1.dataset_id, p2.dataset_id],
        "diff": diff,
        "classification": labels or ["similar"],
        "thresholds": limits,
    }


def radar_coordinates(profile: DataBiasProfile) -> dict:
    """Axis values in [0, 1]: RD and SD via (v+1)/2, sAUC unchanged."""
    return {
        "RD": (profile.rd + 1) / 2,
        "SD": (profile.sd + 1) / 2,
        "sAUC": profile.sauc,
    }


def is_finite_profile(profile: DataBiasProfile) -> bool:
    return all(math.isfinite(getattr(profile, m)) for m in PROFILE_MEASURES)
