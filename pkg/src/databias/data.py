"""Tabular datasets: schemas, CSV loading, encoding, splitting, synthetic data.

Raw cell values are kept as strings so that a dataset written back to CSV is
row-identical to its source. Targets and sensitive attributes are mapped to
binary vectors at load time (``y=1`` for the positive class, ``s=1`` for the
advantaged group).

Value expressions used by ``positive_value``/``advantaged_value`` (and their
negative/disadvantaged counterparts) accept:

* a literal, e.g. ``Male``
* alternatives separated by ``|``, e.g. ``Married-civ-spouse|Married-AF-spouse``
* a numeric comparison, e.g. ``>25`` or ``<=25`` (only when the operand
  parses as a number; ``>50K`` is therefore a literal)
"""
from __future__ import annotations

import csv
import json
import math
import operator
import warnings
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    BadNumericValue,
    DataBiasWarning,
    EmptyDataset,
    EmptyFitSet,
    MissingColumn,
    SchemaError,
    SchemaMismatch,
    UnmappableValue,
)

ROLES = ("feature", "target", "sensitive", "ignored")
KINDS = ("numeric", "categorical")
MISSING_TOKENS = frozenset({"", "?", "NA", "NaN", "nan", "null", "None"})

_COMPARATORS = {
    ">=": operator.ge,
    "<=": operator.le,
    ">": operator.gt,
    "<": operator.lt,
}


def _compile_alternative(expr: str) -> Callable[[str], bool]:
    for sym in (">=", "<=", ">", "<"):
        if expr.startswith(sym):
            try:
                bound = float(expr[len(sym):])
            except ValueError:
                break
            op = _COMPARATORS[sym]

            def compare(value, op=op, bound=bound):
                try:
                    return op(float(value), bound)
                except ValueError:
                    return False

            return compare
    return lambda value, expr=expr: value == expr


def value_matcher(expr: str) -> Callable[[str], bool]:
    """Compile a value expression into a predicate over raw cell strings."""
    alternatives = [_compile_alternative(a.strip()) for a in expr.split("|")]
    return lambda value: any(match(value) for match in alternatives)


def _is_literal(expr: str | None) -> bool:
    if expr is None or "|" in expr:
        return False
    return not any(expr.startswith(sym) and _is_number(expr[len(sym):]) for sym in _COMPARATORS)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


@dataclass(frozen=True)
class ColumnSpec:
    """One column of a dataset schema.

    ``negative_value`` and ``disadvantaged_value`` are optional; when set, raw
    values matching neither side of the mapping are rejected.
    """

    name: str
    role: str = "feature"
    kind: str = "categorical"
    positive_value: str | None = None
    advantaged_value: str | None = None
    negative_value: str | None = None
    disadvantaged_value: str | None = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise SchemaError(f"column {self.name!r}: unknown role {self.role!r}")
        if self.kind not in KINDS:
            raise SchemaError(f"column {self.name!r}: unknown kind {self.kind!r}")
        if (self.positive_value is not None) != (self.role == "target"):
            raise SchemaError(f"column {self.name!r}: positive_value is required iff role=target")
        if (self.advantaged_value is not None) != (self.role == "sensitive"):
            raise SchemaError(f"column {self.name!r}: advantaged_value is required iff role=sensitive")
        if self.negative_value is not None and self.role != "target":
            raise SchemaError(f"column {self.name!r}: negative_value only applies to targets")
        if self.disadvantaged_value is not None and self.role != "sensitive":
            raise SchemaError(f"column {self.name!r}: disadvantaged_value only applies to sensitive columns")

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, obj: dict) -> "ColumnSpec":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(obj) - known
        if extra:
            raise SchemaError(f"unknown ColumnSpec fields: {sorted(extra)}")
        if "name" not in obj:
            raise SchemaError("ColumnSpec without a name")
        return cls(**obj)


def validate_schema(schema: Sequence[ColumnSpec]) -> tuple[ColumnSpec, ...]:
    schema = tuple(schema)
    names = [c.name for c in schema]
    if len(set(names)) != len(names):
        raise SchemaError("duplicate column names in schema")
    for role in ("target", "sensitive"):
        count = sum(c.role == role for c in schema)
        if count != 1:
            raise SchemaError(f"schema needs exactly one {role} column, found {count}")
    return schema


def read_schema(path) -> tuple[ColumnSpec, ...]:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise SchemaError(f"{path}: schema must be a JSON array of column objects")
    return validate_schema(ColumnSpec.from_dict(obj) for obj in raw)


def write_schema(schema: Sequence[ColumnSpec], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([c.to_dict() for c in schema], fh, indent=2)
        fh.write("\n")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class TabularDataset:
    """Immutable table of raw string cells with binary target and group vectors."""

    def __init__(self, schema, columns: dict, y, s, name: str = "dataset"):
        self.schema = validate_schema(schema)
        self.name = name
        self._columns = {}
        for spec in self.schema:
            if spec.name not in columns:
                raise MissingColumn(spec.name, "column data")
            self._columns[spec.name] = _frozen(np.asarray(columns[spec.name], dtype=object).copy())
        self.y = _frozen(np.asarray(y, dtype=np.int8).copy())
        self.s = _frozen(np.asarray(s, dtype=np.int8).copy())
        n = len(self.y)
        if n < 1:
            raise EmptyDataset(f"{name}: no rows")
        if len(self.s) != n or any(len(c) != n for c in self._columns.values()):
            raise SchemaError(f"{name}: columns have inconsistent lengths")
        self._numeric_cache: dict[str, np.ndarray] = {}

    def __len__(self):
        return len(self.y)

    def __repr__(self):
        return f"TabularDataset({self.name!r}, n={self.n}, columns={len(self.schema)})"

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def target(self) -> ColumnSpec:
        return next(c for c in self.schema if c.role == "target")

    @property
    def sensitive(self) -> ColumnSpec:
        return next(c for c in self.schema if c.role == "sensitive")

    @property
    def feature_columns(self) -> list[ColumnSpec]:
        return [c for c in self.schema if c.role == "feature"]

    def column(self, name: str) -> np.ndarray:
        try:
            return self._columns[name]
        except KeyError:
            raise MissingColumn(name, f"dataset {self.name!r}") from None

    def numeric(self, name: str) -> np.ndarray:
        """Column parsed as floats, NaN for missing tokens."""
        if name not in self._numeric_cache:
            self._numeric_cache[name] = _frozen(_parse_numeric(name, self.column(name)))
        return self._numeric_cache[name]

    @property
    def rows(self) -> list[tuple]:
        cols = [self._columns[c.name] for c in self.schema]
        return list(zip(*cols))

    # -- derivations (all return new datasets) -----------------------------

    def take(self, indices) -> "TabularDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return TabularDataset(
            self.schema,
            {k: v[idx] for k, v in self._columns.items()},
            self.y[idx],
            self.s[idx],
            name=self.name,
        )

    def with_labels(self, y) -> "TabularDataset":
        """Replace binary targets, rewriting raw target cells that changed."""
        y = np.asarray(y, dtype=np.int8)
        target = self.target
        raw = self._columns[target.name].copy()
        changed = y != self.y
        if changed.any():
            raw[changed & (y == 0)] = self._negative_literal()
            raw[changed & (y == 1)] = self._positive_literal()
        cols = dict(self._columns)
        cols[target.name] = raw
        return TabularDataset(self.schema, cols, y, self.s, name=self.name)

    def with_column(self, spec: ColumnSpec, values: Sequence[str]) -> "TabularDataset":
        if spec.name in self._columns:
            raise SchemaError(f"column {spec.name!r} already exists")
        cols = dict(self._columns)
        cols[spec.name] = np.asarray(values, dtype=object)
        return TabularDataset(self.schema + (spec,), cols, self.y, self.s, name=self.name)

    def without_columns(self, names: Iterable[str]) -> "TabularDataset":
        names = set(names)
        for n in names:
            spec = next((c for c in self.schema if c.name == n), None)
            if spec is None:
                raise MissingColumn(n, f"dataset {self.name!r}")
            if spec.role in ("target", "sensitive"):
                raise SchemaError(f"cannot drop {spec.role} column {n!r}")
        schema = tuple(c for c in self.schema if c.name not in names)
        cols = {k: v for k, v in self._columns.items() if k not in names}
        return TabularDataset(schema, cols, self.y, self.s, name=self.name)

    def with_sensitive(self, name: str, advantaged_value: str,
                       disadvantaged_value: str | None = None,
                       previous_role: str = "feature") -> "TabularDataset":
        """Make ``name`` the sensitive column; the old one takes ``previous_role``."""
        old = self.sensitive
        if name == old.name and advantaged_value == old.advantaged_value:
            return self
        schema = []
        for c in self.schema:
            if c.name == name:
                c = replace(c, role="sensitive", advantaged_value=advantaged_value,
                            disadvantaged_value=disadvantaged_value,
                            positive_value=None, negative_value=None)
            elif c.name == old.name:
                c = replace(c, role=previous_role, advantaged_value=None, disadvantaged_value=None)
            schema.append(c)
        if not any(c.name == name for c in self.schema):
            raise MissingColumn(name, f"dataset {self.name!r}")
        new_spec = next(c for c in schema if c.name == name)
        if new_spec.role == "target":
            raise SchemaError("the target column cannot be sensitive")
        s = _map_binary(new_spec, self._columns[name], new_spec.advantaged_value,
                        new_spec.disadvantaged_value)
        return TabularDataset(schema, self._columns, self.y, s, name=self.name)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([c.name for c in self.schema])
            writer.writerows(self.rows)

    def _positive_literal(self) -> str:
        t = self.target
        if _is_literal(t.positive_value):
            return t.positive_value
        return _first_matching(self._columns[t.name], self.y, 1) or t.positive_value

    def _negative_literal(self) -> str:
        t = self.target
        if _is_literal(t.negative_value):
            return t.negative_value
        found = _first_matching(self._columns[t.name], self.y, 0)
        if found is not None:
            return found
        return t.negative_value or f"not {t.positive_value}"


def _first_matching(raw, binary, value):
    hits = np.flatnonzero(binary == value)
    return str(raw[hits[0]]) if len(hits) else None


def _parse_numeric(name: str, raw: np.ndarray) -> np.ndarray:
    out = np.empty(len(raw), dtype=np.float64)
    for i, v in enumerate(raw):
        if v in MISSING_TOKENS:
            out[i] = np.nan
            continue
        try:
            out[i] = float(v)
        except (TypeError, ValueError):
            raise BadNumericValue(name, v) from None
        if not math.isfinite(out[i]):
            raise BadNumericValue(name, v)
    return out


def _map_binary(spec: ColumnSpec, raw, positive_expr, negative_expr, lines=None) -> np.ndarray:
    is_pos = value_matcher(positive_expr)
    is_neg = value_matcher(negative_expr) if negative_expr is not None else None
    out = np.empty(len(raw), dtype=np.int8)
    for i, v in enumerate(raw):
        if is_pos(v):
            out[i] = 1
        elif is_neg is None or is_neg(v):
            out[i] = 0
        else:
            raise UnmappableValue(spec.name, v, None if lines is None else lines[i])
    return out


def load_csv(path, schema: Sequence[ColumnSpec], name: str | None = None) -> TabularDataset:
    """Read a comma-delimited UTF-8 CSV with a header row.

    Rows whose target or sensitive cell is missing are dropped with a
    :class:`DataBiasWarning`. Extra file columns not named in the schema are
    ignored.
    """
    schema = validate_schema(schema)
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyDataset(f"{path}: file is empty") from None
        positions = {}
        for spec in schema:
            if spec.name not in header:
                raise MissingColumn(spec.name, str(path))
            positions[spec.name] = header.index(spec.name)
        cols: dict[str, list] = {c.name: [] for c in schema}
        lines = []
        target, sensitive = _role(schema, "target"), _role(schema, "sensitive")
        dropped = 0
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise SchemaMismatch(f"{path} line {lineno}: expected {len(header)} fields, got {len(row)}")
            cells = {k: row[p].strip() for k, p in positions.items()}
            if cells[target.name] in MISSING_TOKENS or cells[sensitive.name] in MISSING_TOKENS:
                dropped += 1
                continue
            for k, v in cells.items():
                cols[k].append(v)
            lines.append(lineno)
    if not lines:
        raise EmptyDataset(f"{path}: no usable rows")
    if dropped:
        warnings.warn(f"{path}: dropped {dropped} rows with missing target or sensitive value",
                      DataBiasWarning, stacklevel=2)
    raw_t = np.asarray(cols[target.name], dtype=object)
    raw_s = np.asarray(cols[sensitive.name], dtype=object)
    y = _map_binary(target, raw_t, target.positive_value, target.negative_value, lines)
    s = _map_binary(sensitive, raw_s, sensitive.advantaged_value, sensitive.disadvantaged_value, lines)
    ds = TabularDataset(schema, cols, y, s, name=name or path.stem)
    for spec in schema:
        if spec.kind == "numeric" and spec.role == "feature":
            ds.numeric(spec.name)  # fail early on unparseable cells
    return ds


def _role(schema, role) -> ColumnSpec:
    return next(c for c in schema if c.role == role)


# -- encoding -----------------------------------------------------------------

@dataclass(frozen=True)
class Encoder:
    """Per-column statistics fitted on a subset of rows."""

    columns: tuple[ColumnSpec, ...]
    means: dict
    stds: dict
    categories: dict
    warnings: tuple[str, ...] = ()

    @property
    def feature_names(self) -> list[str]:
        names = []
        for spec in self.columns:
            if spec.kind == "numeric":
                names.append(spec.name)
            else:
                names.extend(f"{spec.name}={cat}" for cat in self.categories[spec.name])
        return names

    @property
    def sources(self) -> list[str]:
        out = []
        for spec in self.columns:
            width = 1 if spec.kind == "numeric" else len(self.categories[spec.name])
            out.extend([spec.name] * width)
        return out


def fit_encoder(dataset: TabularDataset, fit_indices=None) -> Encoder:
    """Fit standardization and category vocabularies on ``fit_indices`` only.

    Numeric columns use the population standard deviation; a constant column
    gets std 1 and a recorded warning. Categories are sorted for a stable
    column order.
    """
    if fit_indices is None:
        idx = np.arange(dataset.n)
    else:
        idx = np.asarray(fit_indices, dtype=np.int64)
    if idx.size == 0:
        raise EmptyFitSet("cannot fit an encoder on zero rows")
    if idx.min() < 0 or idx.max() >= dataset.n:
        raise IndexError("fit indices out of bounds")
    means, stds, cats, notes = {}, {}, {}, []
    for spec in dataset.feature_columns:
        if spec.kind == "numeric":
            vals = dataset.numeric(spec.name)[idx]
            present = vals[~np.isnan(vals)]
            mean = float(present.mean()) if present.size else 0.0
            std = float(present.std()) if present.size else 0.0
            if std == 0.0:
                notes.append(f"ZeroVariance: column {spec.name!r} is constant on the fit set; std set to 1")
                std = 1.0
            means[spec.name], stds[spec.name] = mean, std
        else:
            raw = dataset.column(spec.name)[idx]
            cats[spec.name] = tuple(sorted({v for v in raw if v not in MISSING_TOKENS}))
    for note in notes:
        warnings.warn(note, DataBiasWarning, stacklevel=2)
    return Encoder(tuple(dataset.feature_columns), means, stds, cats, tuple(notes))


@dataclass(frozen=True)
class EncodedMatrix:
    features: np.ndarray
    y: np.ndarray
    s: np.ndarray
    feature_names: tuple[str, ...]
    sources: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.sources:
            object.__setattr__(self, "sources", tuple(self.feature_names))
        if self.features.shape != (len(self.y), len(self.feature_names)):
            raise SchemaMismatch("feature matrix shape does not match names/labels")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]

    def decode(self) -> dict[str, str]:
        """Map each encoded column name to the source column it came from."""
        return dict(zip(self.feature_names, self.sources))

    def rows(self, indices) -> "EncodedMatrix":
        idx = np.asarray(indices, dtype=np.int64)
        return EncodedMatrix(self.features[idx], self.y[idx], self.s[idx],
                             self.feature_names, self.sources)

    def drop_sources(self, sources: Iterable[str]) -> "EncodedMatrix":
        """Remove every encoded column originating from the given source columns."""
        sources = set(sources)
        keep = [i for i, src in enumerate(self.sources) if src not in sources]
        return EncodedMatrix(
            np.ascontiguousarray(self.features[:, keep]),
            self.y, self.s,
            tuple(self.feature_names[i] for i in keep),
            tuple(self.sources[i] for i in keep),
        )


def encode(dataset: TabularDataset, encoder: Encoder) -> EncodedMatrix:
    blocks = []
    for spec in encoder.columns:
        match = next((c for c in dataset.schema if c.name == spec.name), None)
        if match is None or match.kind != spec.kind or match.role != "feature":
            raise SchemaMismatch(f"encoder column {spec.name!r} not a {spec.kind} feature of {dataset.name!r}")
        if spec.kind == "numeric":
            vals = dataset.numeric(spec.name)
            # missing -> fit mean, i.e. 0 after standardization
            z = (vals - encoder.means[spec.name]) / encoder.stds[spec.name]
            blocks.append(np.nan_to_num(z, nan=0.0)[:, None])
        else:
            cats = np.asarray(encoder.categories[spec.name], dtype=str)
            raw = dataset.column(spec.name).astype(str)
            block = np.zeros((dataset.n, len(cats)))
            if len(cats):
                pos = np.minimum(np.searchsorted(cats, raw), len(cats) - 1)
                hit = cats[pos] == raw
                block[np.flatnonzero(hit), pos[hit]] = 1.0
            blocks.append(block)
    features = np.hstack(blocks) if blocks else np.zeros((dataset.n, 0))
    features = np.ascontiguousarray(features, dtype=np.float64)
    return EncodedMatrix(features, np.asarray(dataset.y, dtype=np.int64),
                         np.asarray(dataset.s, dtype=np.int64),
                         tuple(encoder.feature_names), tuple(encoder.sources))


# -- splitting ----------------------------------------------------------------

@dataclass(frozen=True)
class SplitIndices:
    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray
    seed: int
    warnings: tuple[str, ...] = ()

    @property
    def parts(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.train, self.validation, self.test


def _apportion(count: int, fractions: Sequence[float]) -> list[int]:
    """Largest-remainder allocation: each share is within 1 of fraction*count."""
    exact = [f * count for f in fractions]
    sizes = [math.floor(e) for e in exact]
    remainder = count - sum(sizes)
    order = sorted(range(len(fractions)), key=lambda j: (-(exact[j] - sizes[j]), j))
    for j in order[:remainder]:
        sizes[j] += 1
    return sizes


def stratified_split(dataset, fractions=(0.8, 0.1, 0.1), seed: int = 0) -> SplitIndices:
    """Split rows into train/validation/test, stratified on the (y, s) pair.

    ``dataset`` may be a :class:`TabularDataset`, an :class:`EncodedMatrix` or
    a ``(y, s)`` tuple of arrays.
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or any(f <= 0 for f in fractions) or abs(sum(fractions) - 1) > 1e-9:
        raise ValueError(f"split fractions must be three positive numbers summing to 1, got {fractions}")
    y, s = (dataset if isinstance(dataset, tuple) else (dataset.y, dataset.s))
    y, s = np.asarray(y), np.asarray(s)
    rng = np.random.default_rng(seed)
    parts: list[list[np.ndarray]] = [[], [], []]
    notes = []
    for yv in (0, 1):
        for sv in (0, 1):
            members = np.flatnonzero((y == yv) & (s == sv))
            if members.size == 0:
                continue
            members = rng.permutation(members)
            if members.size < 3:
                notes.append(f"StratumTooSmall: stratum (y={yv}, s={sv}) has {members.size} rows; "
                             "assigned at random")
                assign = rng.choice(3, size=members.size, p=fractions)
                for j in range(3):
                    parts[j].append(members[assign == j])
                continue
            sizes = _apportion(members.size, fractions)
            bounds = np.cumsum([0] + sizes)
            for j in range(3):
                parts[j].append(members[bounds[j]:bounds[j + 1]])
    for note in notes:
        warnings.warn(note, DataBiasWarning, stacklevel=2)
    train, val, test = (np.sort(np.concatenate(p)) if p else np.zeros(0, dtype=np.int64) for p in parts)
    return SplitIndices(train, val, test, seed, tuple(notes))


# -- synthetic data -----------------------------------------------------------

@dataclass(frozen=True)
class SyntheticSpec:
    n: int = 10000
    prevalence_a: float = 0.5
    base_rate_a: float = 0.5
    base_rate_d: float = 0.5
    proxy_corr: float = 0.0
    noise_dim: int = 2

    def __post_init__(self):
        for k in ("prevalence_a", "base_rate_a", "base_rate_d", "proxy_corr"):
            v = getattr(self, k)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{k} must lie in [0, 1], got {v}")
        if self.n < 10:
            raise ValueError("synthetic datasets need n >= 10")
        if self.noise_dim < 0:
            raise ValueError("noise_dim must be non-negative")


SYNTHETIC_TARGET = "y"
SYNTHETIC_SENSITIVE = "group"


def synthetic_schema(noise_dim: int) -> tuple[ColumnSpec, ...]:
    cols = [
        ColumnSpec("informative", "feature", "numeric"),
        ColumnSpec("proxy", "feature", "numeric"),
    ]
    cols += [ColumnSpec(f"noise_{j}", "feature", "numeric") for j in range(noise_dim)]
    cols += [
        ColumnSpec(SYNTHETIC_SENSITIVE, "sensitive", "categorical", advantaged_value="a", disadvantaged_value="d"),
        ColumnSpec(SYNTHETIC_TARGET, "target", "categorical", positive_value="1", negative_value="0"),
    ]
    return tuple(cols)


def _fmt(values: np.ndarray) -> np.ndarray:
    return np.array([repr(float(v)) for v in values], dtype=object)


def make_synthetic(spec: SyntheticSpec | dict, seed: int = 0) -> TabularDataset:
    """Draw a dataset with one informative feature, one proxy of s and noise.

    The proxy is ``s + N(0, std^2)`` with std chosen so its population Pearson
    correlation with s equals ``proxy_corr``; ``proxy_corr=0`` gives pure noise.
    """
    if isinstance(spec, dict):
        spec = SyntheticSpec(**spec)
    rng = np.random.default_rng(seed)
    n = spec.n
    s = (rng.random(n) < spec.prevalence_a).astype(np.int8)
    rates = np.where(s == 1, spec.base_rate_a, spec.base_rate_d)
    y = (rng.random(n) < rates).astype(np.int8)
    informative = rng.standard_normal(n) + np.where(y == 1, 1.0, -1.0)
    sigma_s = math.sqrt(spec.prevalence_a * (1 - spec.prevalence_a))
    noise = rng.standard_normal(n)
    if spec.proxy_corr == 0.0:
        proxy = noise
    else:
        proxy = s + noise * (sigma_s * math.sqrt(1.0 / spec.proxy_corr ** 2 - 1.0))
    cols = {"informative": _fmt(informative), "proxy": _fmt(proxy)}
    for j in range(spec.noise_dim):
        cols[f"noise_{j}"] = _fmt(rng.standard_normal(n))
    cols[SYNTHETIC_SENSITIVE] = np.where(s == 1, "a", "d").astype(object)
    cols[SYNTHETIC_TARGET] = np.where(y == 1, "1", "0").astype(object)
    return TabularDataset(synthetic_schema(spec.noise_dim), cols, y, s, name="synthetic")
