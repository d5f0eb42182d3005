"""Classifiers exposing posterior scores: L2 logistic regression and a CART forest."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import sparse
from scipy.special import expit

from .errors import NonFiniteLoss, ShapeMismatch

MODEL_KINDS = ("logistic", "forest")


@dataclass(frozen=True)
class TrainConfig:
    model_kind: str = "logistic"
    l2_lambda: float = 1e-4
    max_iters: int = 5000
    tol: float = 1e-8
    learning_rate: float = 0.1
    n_trees: int = 100
    max_depth: int = 8
    min_leaf: int = 5
    feature_subsample: float | None = None  # None -> sqrt(m)/m
    seed: int = 0
    early_stopping: bool = False  # monitor validation loss when a validation set is given
    patience: int = 20

    def __post_init__(self):
        if self.model_kind not in MODEL_KINDS:
            raise ValueError(f"model_kind must be one of {MODEL_KINDS}")
        if self.tol <= 0 or self.learning_rate <= 0:
            raise ValueError("tol and learning_rate must be positive")
        if self.l2_lambda < 0 or self.max_iters < 0:
            raise ValueError("l2_lambda and max_iters must be non-negative")
        if self.n_trees < 1 or self.max_depth < 0 or self.min_leaf < 1:
            raise ValueError("forest needs n_trees >= 1, max_depth >= 0, min_leaf >= 1")
        if self.feature_subsample is not None and not 0 < self.feature_subsample <= 1:
            raise ValueError("feature_subsample must lie in (0, 1]")

    def with_seed(self, seed: int) -> "TrainConfig":
        return replace(self, seed=int(seed))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "TrainConfig":
        return cls(**obj)

    def digest(self) -> str:
        """Hash of every field except the seed."""
        body = {k: v for k, v in self.to_dict().items() if k != "seed"}
        blob = json.dumps(body, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class Tree:
    feature: np.ndarray    # -1 at leaves
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray      # positive-class fraction

    def to_dict(self) -> dict:
        return {k: getattr(self, k).tolist() for k in ("feature", "threshold", "left", "right", "value")}

    @classmethod
    def from_dict(cls, obj: dict) -> "Tree":
        return cls(
            np.asarray(obj["feature"], dtype=np.int64),
            np.asarray(obj["threshold"], dtype=np.float64),
            np.asarray(obj["left"], dtype=np.int64),
            np.asarray(obj["right"], dtype=np.int64),
            np.asarray(obj["value"], dtype=np.float64),
        )

    def leaf_values(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[node] >= 0
        while active.any():
            r, nd = rows[active], node[active]
            go_left = X[r, self.feature[nd]] <= self.threshold[nd]
            node[r] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] >= 0
        return self.value[node]


@dataclass
class TrainedClassifier:
    model_kind: str
    feature_count: int
    weights: np.ndarray | None = None  # logistic: m coefficients then intercept
    trees: list = field(default_factory=list)
    training_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=np.float64)
            if not np.all(np.isfinite(self.weights)):
                raise NonFiniteLoss("model parameters are not finite")

    def predict_proba(self, X) -> np.ndarray:
        return predict_proba(self, X)

    def to_dict(self) -> dict:
        out = {"model_kind": self.model_kind, "feature_count": self.feature_count,
               "training_meta": self.training_meta}
        if self.model_kind == "logistic":
            out["weights"] = self.weights.tolist()
        else:
            out["trees"] = [t.to_dict() for t in self.trees]
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "TrainedClassifier":
        kind = obj["model_kind"]
        if kind == "logistic":
            return cls(kind, obj["feature_count"], weights=obj["weights"],
                       training_meta=obj.get("training_meta", {}))
        return cls(kind, obj["feature_count"], trees=[Tree.from_dict(t) for t in obj["trees"]],
                   training_meta=obj.get("training_meta", {}))


def _check_xy(X, y):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeMismatch("X must be a 2-D matrix")
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] != y.shape[0] or X.shape[0] < 1:
        raise ShapeMismatch(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite values")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("y must be binary")
    return X, y


# -- logistic regression ----------------------------------------------------------------

def _softplus(z):
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def logistic_loss(params: np.ndarray, X, y, l2_lambda: float) -> float:
    """Mean log-loss plus (l2_lambda/2)*||w||^2; the intercept is unpenalized."""
    w, b = params[:-1], params[-1]
    z = X @ w + b
    return float(np.mean(_softplus(z) - y * z) + 0.5 * l2_lambda * (w @ w))


def logistic_gradient(params: np.ndarray, X, y, l2_lambda: float) -> np.ndarray:
    w, b = params[:-1], params[-1]
    r = (expit(X @ w + b) - y) / X.shape[0]
    return np.append(X.T @ r + l2_lambda * w, r.sum())


def _operator(X):
    """Sparse copies speed up products on one-hot heavy matrices."""
    if X.size >= 50_000 and np.count_nonzero(X) < 0.3 * X.size:
        A = sparse.csr_matrix(X)
        return A, A.T.tocsr()
    return X, X.T


def train_logistic(X, y, config: TrainConfig = TrainConfig(), X_val=None, y_val=None) -> TrainedClassifier:
    """Full-batch gradient descent from zero weights with a fixed step size.

    Stops after ``max_iters`` steps or once consecutive losses differ by less
    than ``tol``.
    """
    X, y = _check_xy(X, y)
    n, m = X.shape
    A, AT = _operator(X)
    lam, lr = config.l2_lambda, config.learning_rate
    w = np.zeros(m)
    b = 0.0
    prev = None
    steps = 0
    monitor = config.early_stopping and X_val is not None
    best = (math.inf, w.copy(), b)
    stale = 0
    with np.errstate(over="ignore", invalid="ignore"):  # divergence is reported below
        for _ in range(config.max_iters):
            z = A @ w + b
            loss = float(np.mean(_softplus(z) - y * z) + 0.5 * lam * (w @ w))
            if not math.isfinite(loss):
                raise NonFiniteLoss(f"loss became {loss} after {steps} steps; lower the learning rate")
            if prev is not None and abs(loss - prev) < config.tol:
                break
            prev = loss
            r = (expit(z) - y) / n
            w = w - lr * (AT @ r + lam * w)
            b = b - lr * r.sum()
            steps += 1
            if monitor:
                val_loss = logistic_loss(np.append(w, b), X_val, y_val, 0.0)
                if val_loss < best[0]:
                    best, stale = (val_loss, w.copy(), b), 0
                else:
                    stale += 1
                    if stale >= config.patience:
                        _, w, b = best
                        break
    params = np.append(w, b)
    final = logistic_loss(params, A, y, lam)
    if not math.isfinite(final) or not np.all(np.isfinite(params)):
        raise NonFiniteLoss("training diverged; lower the learning rate")
    return TrainedClassifier("logistic", m, weights=params,
                             training_meta={"iterations_run": steps, "final_loss": final})


# -- CART forest ---------------------------------------------------------------------------

def _gini(pos, total):
    p = pos / total
    return 2.0 * p * (1.0 - p)


def _best_split(Xn, yn, features, min_leaf):
    """Best (feature, threshold, weighted child impurity) over candidate features."""
    n = yn.size
    best = (None, 0.0, math.inf)
    for j in features:
        order = np.argsort(Xn[:, j], kind="stable")
        xs, ys = Xn[order, j], yn[order]
        left_pos = np.cumsum(ys)[:-1]
        left_n = np.arange(1, n)
        valid = xs[1:] > xs[:-1]
        valid &= (left_n >= min_leaf) & (n - left_n >= min_leaf)
        if not valid.any():
            continue
        total_pos = left_pos[-1] + ys[-1]
        right_pos = total_pos - left_pos
        right_n = n - left_n
        impurity = (left_n * _gini(left_pos, left_n) + right_n * _gini(right_pos, right_n)) / n
        impurity = np.where(valid, impurity, math.inf)
        i = int(np.argmin(impurity))
        if impurity[i] < best[2]:
            best = (int(j), 0.5 * (xs[i] + xs[i + 1]), float(impurity[i]))
    return best


def _grow_tree(X, y, rows, config, n_features, rng) -> Tree:
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(rows_):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(y[rows_].mean()))
        return len(feature) - 1

    stack = [(new_node(rows), rows, 0)]
    m = X.shape[1]
    while stack:
        node, rows_, depth = stack.pop()
        yn = y[rows_]
        pos = yn.sum()
        if depth >= config.max_depth or pos == 0 or pos == yn.size or yn.size < 2 * config.min_leaf:
            continue
        features = np.sort(rng.choice(m, size=n_features, replace=False))
        j, thr, impurity = _best_split(X[rows_], yn, features, config.min_leaf)
        if j is None or impurity > _gini(pos, yn.size) + 1e-12:
            continue
        mask = X[rows_, j] <= thr
        feature[node], threshold[node] = j, thr
        left[node] = new_node(rows_[mask])
        right[node] = new_node(rows_[~mask])
        stack.append((right[node], rows_[~mask], depth + 1))
        stack.append((left[node], rows_[mask], depth + 1))
    return Tree(np.array(feature, dtype=np.int64), np.array(threshold), np.array(left, dtype=np.int64),
                np.array(right, dtype=np.int64), np.array(value))


def train_forest(X, y, config: TrainConfig = TrainConfig(model_kind="forest")) -> TrainedClassifier:
    """Bagged CART trees with Gini splits over a random feature subset per split."""
    X, y = _check_xy(X, y)
    n, m = X.shape
    fraction = config.feature_subsample if config.feature_subsample is not None else (
        math.sqrt(m) / m if m else 1.0)
    n_features = min(m, max(1, math.ceil(fraction * m))) if m else 0
    trees = []
    for t in range(config.n_trees):
        rng = np.random.default_rng([config.seed, t])
        rows = rng.integers(0, n, size=n)
        if m == 0:
            trees.append(Tree(np.array([-1]), np.zeros(1), np.array([-1]), np.array([-1]),
                              np.array([y[rows].mean()])))
            continue
        trees.append(_grow_tree(X, y, rows, config, n_features, rng))
    return TrainedClassifier("forest", m, trees=trees,
                             training_meta={"iterations_run": config.n_trees, "final_loss": None})


def train(X, y, config: TrainConfig, X_val=None, y_val=None) -> TrainedClassifier:
    if config.model_kind == "logistic":
        return train_logistic(X, y, config, X_val, y_val)
    return train_forest(X, y, config)


def predict_proba(model: TrainedClassifier, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.feature_count:
        raise ShapeMismatch(f"model expects {model.feature_count} columns, got shape {X.shape}")
    if model.model_kind == "logistic":
        A, _ = _operator(X)
        return expit(A @ model.weights[:-1] + model.weights[-1])
    total = np.zeros(X.shape[0])
    for tree in model.trees:
        total += tree.leaf_values(X)
    return np.clip(total / len(model.trees), 0.0, 1.0)


def classify(probs, threshold: float = 0.5) -> np.ndarray:
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    return (np.asarray(probs) >= threshold).astype(np.int64)
