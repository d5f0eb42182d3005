"""Controlled bias injection: underrepresentation, label flips and proxies.

Every function is pure: inputs are never modified and the same seed gives
the same output. Functions that act on a subset of rows take explicit index
lists, so callers decide which split parts are biased.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import ColumnSpec, EncodedMatrix, TabularDataset, encode, fit_encoder
from .errors import DegenerateSensitive, InvalidBias, NoFeaturesLeft

KINDS = ("underrepresentation", "label_flip", "proxy_add", "proxy_drop")
_PARAM = {"underrepresentation": "u", "label_flip": "f", "proxy_add": "rho", "proxy_drop": "k"}
_ALIASES = {
    "underrep": "underrepresentation",
    "underrepresentation": "underrepresentation",
    "flip": "label_flip",
    "label_flip": "label_flip",
    "proxy-add": "proxy_add",
    "proxy_add": "proxy_add",
    "proxy-drop": "proxy_drop",
    "proxy_drop": "proxy_drop",
}


@dataclass(frozen=True)
class BiasSpec:
    kind: str
    u: float | None = None
    f: float | None = None
    rho: float | None = None
    k: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidBias(f"unknown bias kind {self.kind!r}")
        for kind, param in _PARAM.items():
            value = getattr(self, param)
            if (value is not None) != (kind == self.kind):
                raise InvalidBias(f"bias {self.kind!r} takes exactly the parameter {_PARAM[self.kind]!r}")
        value = self.value
        if self.kind == "proxy_drop":
            if int(value) != value or value < 1:
                raise InvalidBias(f"k must be an integer >= 1, got {value}")
        elif self.kind == "proxy_add":
            if not 0.0 < value <= 1.0:
                raise InvalidBias(f"rho must lie in (0, 1], got {value}")
        elif not 0.0 <= value <= 1.0:
            raise InvalidBias(f"{_PARAM[self.kind]} must lie in [0, 1], got {value}")

    @property
    def value(self):
        return getattr(self, _PARAM[self.kind])

    @classmethod
    def of(cls, kind: str, value, seed: int = 0) -> "BiasSpec":
        if kind == "proxy_drop":
            value = int(value)
        return cls(kind, seed=seed, **{_PARAM[kind]: value})


def parse_bias(text: str, seed: int = 0) -> BiasSpec:
    """Parse ``name:value`` strings such as ``flip:0.2`` or ``proxy-drop:3``."""
    name, sep, raw = text.partition(":")
    if not sep or name not in _ALIASES:
        raise InvalidBias(f"malformed bias {text!r}; expected one of "
                          "underrep:U, flip:F, proxy-add:RHO, proxy-drop:K")
    kind = _ALIASES[name]
    try:
        value = int(raw) if kind == "proxy_drop" else float(raw)
    except ValueError:
        raise InvalidBias(f"malformed bias value in {text!r}") from None
    return BiasSpec.of(kind, value, seed)


@dataclass(frozen=True)
class InjectionReport:
    kind: str
    rows_removed: int = 0
    labels_flipped: int = 0
    columns_added: list = field(default_factory=list)
    columns_dropped: list = field(default_factory=list)
    realized_corr: float | None = None

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "rows_removed": self.rows_removed,
            "labels_flipped": self.labels_flipped,
            "columns_added": list(self.columns_added),
            "columns_dropped": list(self.columns_dropped),
        }
        if self.realized_corr is not None:
            out["realized_corr"] = self.realized_corr
        return out


def round_half_up(x: float) -> int:
    """Round a non-negative count half away from zero, absorbing float fuzz."""
    return int(math.floor(x + 0.5 + 1e-9))


def _choose(n_pool: int, n_pick: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n_pool, size=n_pick, replace=False))


def underrepresent(dataset: TabularDataset, target_indices, u: float, seed: int = 0):
    """Drop a fraction ``u`` of the disadvantaged rows among ``target_indices``.

    Returns the surviving indices (in their original order) and a report.
    All advantaged rows are kept.
    """
    if not 0.0 <= u <= 1.0:
        raise InvalidBias(f"u must lie in [0, 1], got {u}")
    idx = np.asarray(target_indices, dtype=np.int64)
    is_d = dataset.s[idx] == 0
    d_pos = np.flatnonzero(is_d)
    keep_count = round_half_up((1.0 - u) * d_pos.size)
    keep = ~is_d
    keep[d_pos[_choose(d_pos.size, keep_count, seed)]] = True
    survivors = idx[keep]
    return survivors, InjectionReport("underrepresentation", rows_removed=int(idx.size - survivors.size))


def flip_labels(dataset: TabularDataset, target_indices, f: float, seed: int = 0):
    """Flip ``round(f * count)`` positive labels of the disadvantaged group to negative."""
    if not 0.0 <= f <= 1.0:
        raise InvalidBias(f"f must lie in [0, 1], got {f}")
    idx = np.unique(np.asarray(target_indices, dtype=np.int64))
    eligible = idx[(dataset.s[idx] == 0) & (dataset.y[idx] == 1)]
    n_flip = round_half_up(f * eligible.size)
    if n_flip == 0:
        return dataset, InjectionReport("label_flip")
    chosen = eligible[_choose(eligible.size, n_flip, seed)]
    y = dataset.y.copy()
    y[chosen] = 0
    return dataset.with_labels(y), InjectionReport("label_flip", labels_flipped=int(n_flip))


def proxy_noise_std(rho: float, p: float) -> float:
    """Std of Gaussian noise giving corr(s, s + noise) = rho for Bernoulli(p) s."""
    sigma_s = math.sqrt(p * (1.0 - p))
    return sigma_s * math.sqrt(1.0 / rho ** 2 - 1.0)


def add_proxy(dataset: TabularDataset, rho: float, seed: int = 0, name: str = "proxy_new"):
    """Append a numeric feature ``s + N(0, std^2)`` correlated ``rho`` with s."""
    if not 0.0 < rho <= 1.0:
        raise InvalidBias(f"rho must lie in (0, 1], got {rho}; omit the injection for rho=0")
    s = dataset.s.astype(np.float64)
    p = float(s.mean())
    if p in (0.0, 1.0):
        raise DegenerateSensitive("all rows belong to one group; a proxy of s is undefined")
    std = proxy_noise_std(rho, p)
    rng = np.random.default_rng(seed)
    values = s + (rng.standard_normal(dataset.n) * std if std > 0 else 0.0)
    realized = float(np.corrcoef(s, values)[0, 1])
    column = np.array([repr(float(v)) for v in values], dtype=object)
    out = dataset.with_column(ColumnSpec(name, "feature", "numeric"), column)
    return out, InjectionReport("proxy_add", columns_added=[name], realized_corr=realized)


def abs_correlations(features: np.ndarray, s: np.ndarray) -> np.ndarray:
    """|Pearson correlation| of each column with s; constant columns score 0."""
    x = features - features.mean(axis=0)
    sc = s - s.mean()
    denom = np.sqrt((x * x).sum(axis=0) * (sc @ sc))
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.abs(x.T @ sc) / denom
    return np.where(denom > 0, corr, 0.0)


def strongest_proxies(matrix: EncodedMatrix, k: int) -> list[str]:
    """Source columns removed by ``k`` rounds of the subtractive protocol."""
    if k < 1:
        raise InvalidBias(f"k must be >= 1, got {k}")
    s = matrix.s.astype(np.float64)
    corr = abs_correlations(matrix.features, s)
    alive = np.ones(matrix.m, dtype=bool)
    sources = np.asarray(matrix.sources, dtype=object)
    dropped = []
    for _ in range(k):
        if not alive.any():
            raise NoFeaturesLeft(f"only {len(dropped)} feature groups available, {k} requested")
        best = int(np.argmax(np.where(alive, corr, -1.0)))
        dropped.append(str(sources[best]))
        alive &= sources != sources[best]
    return dropped


def drop_strongest_proxy(data, k: int):
    """Iteratively drop the feature most correlated with s, ``k`` times.

    ``data`` is an :class:`EncodedMatrix` or a :class:`TabularDataset` (which
    is encoded on all of its rows first). Indicator columns of a categorical
    source are dropped together. Returns ``(reduced, dropped_sources, report)``.
    """
    matrix = data if isinstance(data, EncodedMatrix) else encode(data, fit_encoder(data))
    if k > matrix.m:
        raise NoFeaturesLeft(f"cannot drop {k} of {matrix.m} feature columns")
    dropped = strongest_proxies(matrix, k)
    reduced = matrix.drop_sources(dropped)
    removed = [name for name, src in zip(matrix.feature_names, matrix.sources) if src in set(dropped)]
    return reduced, dropped, InjectionReport("proxy_drop", columns_dropped=removed)


def apply_bias(dataset: TabularDataset, spec: BiasSpec, target_indices=None):
    """Apply a bias to ``target_indices`` (all rows by default).

    Returns ``(dataset, report)``; underrepresentation returns the subset of
    surviving rows, proxy removal returns the dataset without the dropped
    source columns.
    """
    idx = np.arange(dataset.n) if target_indices is None else np.asarray(target_indices)
    if spec.kind == "underrepresentation":
        kept, report = underrepresent(dataset, idx, spec.u, spec.seed)
        untouched = np.setdiff1d(np.arange(dataset.n), idx)
        return dataset.take(np.sort(np.concatenate([kept, untouched]))), report
    if spec.kind == "label_flip":
        return flip_labels(dataset, idx, spec.f, spec.seed)
    if spec.kind == "proxy_add":
        return add_proxy(dataset, spec.rho, spec.seed)
    _, dropped, report = drop_strongest_proxy(dataset, spec.k)
    return dataset.without_columns(dropped), report
