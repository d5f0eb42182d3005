"""Seeded repetitions over bias grids with an unbiased test split.

Repetition ``i`` uses ``base_seed + i`` for the split, every injection and
model training, so any single repetition can be rerun in isolation. Bias is
injected into the training and validation rows only; the test rows are kept
untouched and this is asserted on every repetition.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import metadata, resources
from pathlib import Path

import numpy as np

from . import detect, metrics
from .data import SyntheticSpec, TabularDataset, encode, fit_encoder, load_csv, make_synthetic, \
    read_schema, stratified_split
from .datasets import known_sensitive_options, load_bundled
from .errors import DataBiasError, InvalidBias, MetricError, RepetitionFailed, SchemaError, SchemaMismatch
from .inject import KINDS, BiasSpec, add_proxy, flip_labels, strongest_proxies, underrepresent, apply_bias
from .model import TrainConfig, classify, predict_proba, train
from .stats import significance_level, welch_t_test

MODES = ("bias", "detection")
BIAS_METRICS = ("ba", "dp", "eo", "pqp", "tpr_a", "tpr_d", "rd", "sd", "sauc")
DETECTION_METRICS = ("rd", "sd", "sauc")
AXIS_SYMBOL = {"underrepresentation": "u", "label_flip": "f", "proxy_add": "rho", "proxy_drop": "k"}
EXTREME_SUBSTITUTE = 0.95


def artifact_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: dict
    bias_axis: str
    levels: tuple
    name: str = "experiment"
    sensitive_name: str | None = None
    model: TrainConfig = TrainConfig()
    repetitions: int = 10
    base_seed: int = 0
    split_fractions: tuple = (0.8, 0.1, 0.1)
    metrics: tuple = ("ba", "dp", "eo", "pqp")
    mode: str = "bias"
    second_axis: str | None = None
    second_levels: tuple | None = None
    base_dir: str | None = field(default=None, compare=False)  # resolves relative csv paths

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))
        object.__setattr__(self, "split_fractions", tuple(float(v) for v in self.split_fractions))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        if self.second_levels is not None:
            object.__setattr__(self, "second_levels", tuple(float(v) for v in self.second_levels))
        if self.mode not in MODES:
            raise SchemaError(f"mode must be one of {MODES}")
        for axis, levels in ((self.bias_axis, self.levels), (self.second_axis, self.second_levels)):
            if axis is None:
                continue
            if axis not in KINDS:
                raise SchemaError(f"unknown bias axis {axis!r}; expected one of {KINDS}")
            if not levels:
                raise SchemaError(f"levels for {axis} must be non-empty")
            if list(levels) != sorted(levels):
                raise SchemaError(f"levels for {axis} must be sorted ascending")
            for v in levels:
                if v != 0:
                    try:
                        BiasSpec.of(axis, v)
                    except InvalidBias as exc:
                        raise SchemaError(f"level {v} for {axis}: {exc}") from None
                if axis == "proxy_drop" and v != int(v):
                    raise SchemaError("proxy_drop levels are feature counts")
        if (self.second_axis is None) != (self.second_levels is None):
            raise SchemaError("second_axis and second_levels go together")
        if self.second_axis is not None:
            if self.second_axis == self.bias_axis:
                raise SchemaError("the two axes of a joint grid must differ")
            if self.mode != "bias":
                raise SchemaError("joint grids are only supported in bias mode")
        if self.repetitions < 1:
            raise SchemaError("repetitions must be >= 1")
        allowed = DETECTION_METRICS if self.mode == "detection" else BIAS_METRICS
        unknown = [m for m in self.metrics if m not in allowed]
        if unknown or not self.metrics:
            raise SchemaError(f"metrics {unknown or '[]'} not supported in {self.mode} mode; choose from {allowed}")
        ref_keys = {"bundled", "csv", "synthetic"} & set(self.dataset)
        if len(ref_keys) != 1:
            raise SchemaError("dataset must name exactly one of 'bundled', 'csv' or 'synthetic'")

    @property
    def joint(self) -> bool:
        return self.second_axis is not None

    @property
    def grid(self) -> list[tuple]:
        if self.joint:
            return [(a, b) for a in self.levels for b in self.second_levels]
        return [(a,) for a in self.levels]

    @property
    def axes(self) -> tuple:
        return (self.bias_axis, self.second_axis) if self.joint else (self.bias_axis,)

    def seeds(self) -> list[int]:
        return [self.base_seed + i for i in range(self.repetitions)]

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "dataset": self.dataset,
            "sensitive_name": self.sensitive_name,
            "model": self.model.to_dict(),
            "bias_axis": self.bias_axis,
            "levels": list(self.levels),
            "repetitions": self.repetitions,
            "base_seed": self.base_seed,
            "split_fractions": list(self.split_fractions),
            "metrics": list(self.metrics),
            "mode": self.mode,
        }
        if self.joint:
            out["second_axis"] = self.second_axis
            out["second_levels"] = list(self.second_levels)
        return out

    @classmethod
    def from_dict(cls, obj: dict, base_dir=None) -> "ExperimentConfig":
        obj = dict(obj)
        known = set(cls.__dataclass_fields__) - {"base_dir"}
        unknown = set(obj) - known
        if unknown:
            raise SchemaError(f"unknown experiment config fields {sorted(unknown)}")
        for required in ("dataset", "bias_axis", "levels"):
            if required not in obj:
                raise SchemaError(f"experiment config lacks {required!r}")
        if "model" in obj:
            obj["model"] = TrainConfig.from_dict(obj["model"])
        return cls(**obj, base_dir=str(base_dir) if base_dir else None)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    return ExperimentConfig.from_dict(obj, base_dir=path.parent)


def bundled_configs() -> list[str]:
    root = resources.files("databias").joinpath("configs")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_bundled_config(name: str) -> ExperimentConfig:
    name = Path(name).name
    name = name[:-5] if name.endswith(".json") else name
    if name not in bundled_configs():
        raise SchemaError(f"no bundled config {name!r}; available: {', '.join(bundled_configs())}")
    text = resources.files("databias").joinpath("configs", f"{name}.json").read_text(encoding="utf-8")
    return ExperimentConfig.from_dict(json.loads(text))


# -- datasets ----------------------------------------------------------------

@lru_cache(maxsize=8)
def _bundled(name: str, sensitive: str | None) -> TabularDataset:
    return load_bundled(name, sensitive)


def resolve_dataset(config: ExperimentConfig) -> TabularDataset:
    ref = config.dataset
    if "bundled" in ref:
        return _bundled(ref["bundled"], config.sensitive_name)
    if "synthetic" in ref:
        spec = SyntheticSpec(**ref["synthetic"])
        return make_synthetic(spec, seed=int(ref.get("seed", 0)))
    base = Path(config.base_dir) if config.base_dir else Path(".")
    csv_path, schema_path = base / ref["csv"], base / ref.get("schema", "")
    if "schema" not in ref:
        raise SchemaError("a csv dataset reference needs a 'schema' path")
    ds = load_csv(csv_path, read_schema(schema_path))
    return switch_sensitive(ds, config.sensitive_name)


def switch_sensitive(ds: TabularDataset, sensitive_name: str | None) -> TabularDataset:
    """Make ``sensitive_name`` the sensitive column using its registered groups."""
    if sensitive_name is None or sensitive_name == ds.sensitive.name:
        return ds
    options = known_sensitive_options()
    if sensitive_name not in options:
        raise SchemaMismatch(f"no group definition known for sensitive column {sensitive_name!r}; "
                             "edit the schema instead")
    opt = options[sensitive_name]
    return ds.with_sensitive(opt.column, opt.advantaged, opt.disadvantaged)


# -- one repetition -----------------------------------------------------------

@dataclass
class _State:
    ds: TabularDataset
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray
    drop_k: int = 0
    touched: list = field(default_factory=list)  # row indices changed or removed by injection


def _inject(state: _State, axis: str, level: float, seed: int) -> _State:
    """Bias the training and validation rows of ``state`` at ``level``."""
    if level == 0:
        return state
    if axis == "underrepresentation":
        train, _ = underrepresent(state.ds, state.train, level, seed)
        val, _ = underrepresent(state.ds, state.val, level, seed)
        removed = np.setdiff1d(np.concatenate([state.train, state.val]), np.concatenate([train, val]))
        return replace(state, train=train, val=val, touched=state.touched + [removed])
    if axis == "label_flip":
        ds, _ = flip_labels(state.ds, state.train, level, seed)
        ds, _ = flip_labels(ds, state.val, level, seed)
        flipped = np.flatnonzero(ds.y != state.ds.y)
        return replace(state, ds=ds, touched=state.touched + [flipped])
    if axis == "proxy_add":
        # a feature of every row, test included; labels and groups stay untouched
        ds, _ = add_proxy(state.ds, level, seed)
        return replace(state, ds=ds)
    return replace(state, drop_k=state.drop_k + int(level))


def _safe(fn, *args):
    try:
        return float(fn(*args)), None
    except MetricError as exc:
        return math.nan, f"{type(exc).__name__}: {exc}"


def _bias_cell(state: _State, config: ExperimentConfig, seed: int) -> tuple[dict, dict]:
    test_set = set(state.test.tolist())
    for rows in state.touched:
        if test_set.intersection(rows.tolist()):
            raise AssertionError("bias injection touched the test split")
    ds = state.ds
    enc = fit_encoder(ds, state.train)
    full = encode(ds, enc)
    if state.drop_k:
        # proxies are ranked on the training rows, the same columns leave every split
        full = full.drop_sources(strongest_proxies(full.rows(state.train), state.drop_k))
    tr, va, te = full.rows(state.train), full.rows(state.val), full.rows(state.test)
    model_cfg = config.model.with_seed(seed)
    g = train(tr.features, tr.y, model_cfg, va.features, va.y)
    scores = predict_proba(g, te.features)
    yhat = classify(scores)
    y, s = te.y, te.s
    fns = {
        "ba": lambda: metrics.balanced_accuracy(y, yhat),
        "dp": lambda: metrics.demographic_parity(yhat, s),
        "eo": lambda: metrics.equal_opportunity(y, yhat, s),
        "pqp": lambda: metrics.prediction_quality_parity(y, yhat, s),
        "tpr_a": lambda: metrics.groupwise_tpr(y, yhat, s)[0],
        "tpr_d": lambda: metrics.groupwise_tpr(y, yhat, s)[1],
        "rd": lambda: detect.representation_difference(tr.s),
        "sd": lambda: detect.separation_difference(scores, y, s),
        "sauc": lambda: detect.sensitive_auc(tr, te, model_cfg),
    }
    values, errors = {}, {}
    for m in config.metrics:
        values[m], err = _safe(fns[m])
        if err:
            errors[m] = err
    return values, errors


def _detection_level(axis: str, level: float) -> float:
    if axis != "proxy_drop" and level == 1.0:
        return EXTREME_SUBSTITUTE
    return level


def _detection_cell(ds: TabularDataset, axis: str, level: float, config: ExperimentConfig,
                    seed: int) -> tuple[dict, dict]:
    level = _detection_level(axis, level)
    if level != 0:
        ds, _ = apply_bias(ds, BiasSpec.of(axis, level, seed))
    split = stratified_split(ds, config.split_fractions, seed)
    full = encode(ds, fit_encoder(ds, split.train))
    tr, te = full.rows(split.train), full.rows(split.test)
    model_cfg = config.model.with_seed(seed)
    values, errors = {}, {}
    scores = None
    for m in config.metrics:
        if m == "rd":
            values[m], err = _safe(detect.representation_difference, ds.s)
        elif m == "sd":
            if scores is None:
                scores = detect.label_scores(tr, te, model_cfg)
            values[m], err = _safe(detect.separation_difference, scores, te.y, te.s)
        else:
            values[m], err = _safe(detect.sensitive_auc, tr, te, model_cfg)
        if err:
            errors[m] = err
    return values, errors


def run_repetition(config: ExperimentConfig, index: int, dataset: TabularDataset | None = None) -> dict:
    """Evaluate every grid cell for repetition ``index``.

    Returns ``{"seed", "values": {level: {metric: value}}, "errors": [...]}``.
    """
    ds = dataset if dataset is not None else resolve_dataset(config)
    seed = config.base_seed + index
    out = {"index": index, "seed": seed, "values": {}, "errors": []}
    if config.mode == "bias":
        split = stratified_split(ds, config.split_fractions, seed)
        base = _State(ds, split.train, split.validation, split.test)
    for level in config.grid:
        try:
            if config.mode == "bias":
                state = base
                for axis, value in zip(config.axes, level):
                    state = _inject(state, axis, value, seed)
                values, errors = _bias_cell(state, config, seed)
            else:
                values, errors = _detection_cell(ds, config.bias_axis, level[0], config, seed)
        except DataBiasError as exc:
            raise RepetitionFailed(index, seed, level_label(config, level), exc) from exc
        out["values"][level] = values
        for m, err in errors.items():
            out["errors"].append({"repetition": index, "seed": seed,
                                  "level": level_label(config, level), "metric": m, "error": err})
    return out


# -- aggregation ----------------------------------------------------------------

@dataclass(frozen=True)
class CellSummary:
    level: tuple
    metric: str
    values: tuple
    mean: float
    std: float
    n_available: int
    p: float | None
    significance: str

    @property
    def marker(self) -> str:
        return {"p01": "**", "p05": "*", "none": ""}[self.significance]


def _summarize(values) -> tuple[float, float, int]:
    arr = np.asarray([v for v in values if not math.isnan(v)], dtype=np.float64)
    if arr.size == 0:
        return math.nan, math.nan, 0
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), std, int(arr.size)


def _p_value(values, baseline) -> float | None:
    a = [v for v in values if not math.isnan(v)]
    b = [v for v in baseline if not math.isnan(v)]
    if len(a) < 2 or len(b) < 2:
        return None
    return welch_t_test(a, b).p


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    seeds: list
    values: dict             # level -> metric -> list of per-repetition values
    cells: dict              # (level, metric) -> CellSummary
    errors: list
    wall_time: float
    deltas: dict = field(default_factory=dict)  # joint grids: second level -> metric -> summary

    def cell(self, level, metric) -> CellSummary:
        if not isinstance(level, tuple):
            level = (float(level),)
        return self.cells[(tuple(float(v) for v in level), metric)]

    def means(self, metric) -> list[float]:
        return [self.cells[(lv, metric)].mean for lv in self.config.grid]


def _baseline(config: ExperimentConfig, level: tuple) -> tuple:
    if config.joint:
        return (config.levels[0], level[1])
    return (config.levels[0],)


def aggregate(config: ExperimentConfig, reps: list[dict], wall_time: float = 0.0) -> ExperimentResult:
    reps = sorted(reps, key=lambda r: r["index"])
    values = {lv: {m: [r["values"][lv][m] for r in reps] for m in config.metrics} for lv in config.grid}
    cells = {}
    for lv in config.grid:
        base = _baseline(config, lv)
        for m in config.metrics:
            vals = values[lv][m]
            mean, std, n_ok = _summarize(vals)
            p = None if lv == base else _p_value(vals, values[base][m])
            cells[(lv, m)] = CellSummary(lv, m, tuple(vals), mean, std, n_ok, p, significance_level(p))
    deltas = {}
    if config.joint:
        lo, hi = config.levels[0], config.levels[-1]
        for b in config.second_levels:
            deltas[b] = {}
            for m in config.metrics:
                # paired repetitions: same seed at both ends of the first axis
                diff = [x - y for x, y in zip(values[(hi, b)][m], values[(lo, b)][m])]
                mean, std, n_ok = _summarize(diff)
                deltas[b][m] = {"mean": mean, "std": std, "n": n_ok, "values": diff}
    errors = [e for r in reps for e in r["errors"]]
    return ExperimentResult(config, [r["seed"] for r in reps], values, cells, errors, wall_time, deltas)


def run_experiment(config: ExperimentConfig, workers: int = 1, dataset: TabularDataset | None = None
                   ) -> ExperimentResult:
    """Run every repetition (optionally on a thread pool) and aggregate."""
    ds = dataset if dataset is not None else resolve_dataset(config)
    start = time.perf_counter()
    indices = range(config.repetitions)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reps = list(pool.map(lambda i: run_repetition(config, i, ds), indices))
    else:
        reps = [run_repetition(config, i, ds) for i in indices]
    return aggregate(config, reps, time.perf_counter() - start)


def run_bias_grid(config: ExperimentConfig, workers: int = 1, dataset=None) -> ExperimentResult:
    if config.mode != "bias" or config.joint:
        config = replace(config, mode="bias", second_axis=None, second_levels=None)
    return run_experiment(config, workers, dataset)


def run_joint_grid(config: ExperimentConfig, second_axis: str, second_levels, workers: int = 1,
                   dataset=None) -> ExperimentResult:
    config = replace(config, mode="bias", second_axis=second_axis, second_levels=tuple(second_levels))
    return run_experiment(config, workers, dataset)


def run_detection_grid(config: ExperimentConfig, workers: int = 1, dataset=None) -> ExperimentResult:
    if config.mode != "detection":
        metrics_ = tuple(m for m in config.metrics if m in DETECTION_METRICS) or DETECTION_METRICS
        config = replace(config, mode="detection", metrics=metrics_, second_axis=None, second_levels=None)
    return run_experiment(config, workers, dataset)


# -- output ----------------------------------------------------------------------

def _num(v: float) -> str:
    return "%g" % v


def level_label(config: ExperimentConfig, level: tuple) -> str:
    parts = []
    for axis, v in zip(config.axes, level):
        if config.mode == "detection":
            v = _detection_level(axis, v)
        parts.append(f"{AXIS_SYMBOL[axis]}={_num(v)}")
    return ",".join(parts)


def _fmt4(v: float) -> str:
    return "NA" if math.isnan(v) else f"{v:.4f}"


def _full(v: float) -> str:
    return "NA" if math.isnan(v) else repr(float(v))


def repetitions_csv(result: ExperimentResult) -> str:
    """One row per (repetition, level) at full precision."""
    cfg = result.config
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["repetition", "seed", *(AXIS_SYMBOL[a] for a in cfg.axes), *cfg.metrics])
    for i, seed in enumerate(result.seeds):
        for lv in cfg.grid:
            w.writerow([i, seed, *(_num(v) for v in lv),
                        *(_full(result.values[lv][m][i]) for m in cfg.metrics)])
    return buf.getvalue()


def summary_csv(result: ExperimentResult) -> str:
    cfg = result.config
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*(AXIS_SYMBOL[a] for a in cfg.axes), "metric", "mean", "std", "n", "p", "significance"])
    for lv in cfg.grid:
        for m in cfg.metrics:
            c = result.cells[(lv, m)]
            w.writerow([*(_num(v) for v in lv), m, _fmt4(c.mean), _fmt4(c.std), c.n_available,
                        "" if c.p is None else f"{c.p:.4g}", c.significance])
    return buf.getvalue()


def format_cell(c: CellSummary) -> str:
    if c.n_available == 0:
        return "n/a"
    return f"{c.mean:.4f} ± {c.std:.4f}{c.marker}"


def emit_table(result: ExperimentResult, fmt: str = "text", path=None) -> str:
    """Table with one row per (dataset, metric) and one ``mean ± std`` column per level.

    Markers ``*``/``**`` flag p < 0.05 / p < 0.01 against the baseline level.
    """
    cfg = result.config
    header = ["dataset", "metric", *(level_label(cfg, lv) for lv in cfg.grid)]
    dataset = dataset_label(cfg)
    rows = [[dataset, m, *(format_cell(result.cells[(lv, m)]) for lv in cfg.grid)] for m in cfg.metrics]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    elif fmt == "text":
        widths = [max(len(r[j]) for r in [header] + rows) for j in range(len(header))]
        lines = ["  ".join(cell.ljust(wd) for cell, wd in zip(r, widths)).rstrip() for r in [header] + rows]
        if result.deltas:
            symbol = AXIS_SYMBOL[cfg.bias_axis]
            lo, hi = _num(cfg.levels[0]), _num(cfg.levels[-1])
            lines.append("")
            for b, per_metric in result.deltas.items():
                for m, d in per_metric.items():
                    lines.append(f"delta {m} ({symbol}={hi} minus {symbol}={lo}) at "
                                 f"{AXIS_SYMBOL[cfg.second_axis]}={_num(b)}: "
                                 f"{_fmt4(d['mean'])} ± {_fmt4(d['std'])}")
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown table format {fmt!r}; use 'csv' or 'text'")
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def parse_table_csv(text: str) -> dict:
    """Read an emitted CSV table back into ``{(metric, level): (mean, std, marker)}``."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    out = {}
    for row in reader:
        metric = row[1]
        for label, cell in zip(header[2:], row[2:]):
            if cell == "n/a":
                out[(metric, label)] = (math.nan, math.nan, "")
                continue
            mean, _, rest = cell.partition(" ± ")
            marker = rest.lstrip("0123456789.-")
            out[(metric, label)] = (float(mean), float(rest[:len(rest) - len(marker)]), marker)
    return out


def dataset_label(cfg: ExperimentConfig) -> str:
    ref = cfg.dataset
    if "bundled" in ref:
        name = ref["bundled"]
    elif "csv" in ref:
        name = Path(ref["csv"]).stem
    else:
        name = "synthetic"
    return f"{name}/{cfg.sensitive_name}" if cfg.sensitive_name else name


def deltas_json(result: ExperimentResult) -> dict:
    return {_num(b): {m: {k: d[k] for k in ("mean", "std", "n")} for m, d in per.items()}
            for b, per in result.deltas.items()}


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def run_to_directory(config: ExperimentConfig, out_dir, workers: int = 1) -> ExperimentResult:
    """Run an experiment and write summary, repetitions, config echo and metadata.

    ``meta.json`` reads ``"status": "running"`` during the run and
    ``"incomplete"`` if it was interrupted; result tables are only written
    once every repetition has finished.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for stale in ("summary.csv", "repetitions.csv", "table.txt"):
        (out / stale).unlink(missing_ok=True)
    meta = {
        "artifact_version": artifact_version(),
        "seeds": config.seeds(),
        "status": "running",
        "workers": workers,
    }
    if config.joint:
        meta["paired_seeds"] = True
    if config.mode == "detection" and any(_detection_level(config.bias_axis, v) != v for v in config.levels):
        meta["level_substitutions"] = {"1": EXTREME_SUBSTITUTE}
    _write_atomic(out / "config.json", _dump(config.to_dict()))
    _write_atomic(out / "meta.json", _dump(meta))
    try:
        result = run_experiment(config, workers)
    except BaseException as exc:
        meta.update(status="incomplete", error=f"{type(exc).__name__}: {exc}")
        _write_atomic(out / "meta.json", _dump(meta))
        raise
    _write_atomic(out / "repetitions.csv", repetitions_csv(result))
    _write_atomic(out / "summary.csv", summary_csv(result))
    _write_atomic(out / "table.txt", emit_table(result, "text"))
    meta.update(status="complete", wall_time_s=round(result.wall_time, 3), unavailable=result.errors)
    if result.deltas:
        meta["deltas"] = deltas_json(result)
    _write_atomic(out / "meta.json", _dump(meta))
    return result
