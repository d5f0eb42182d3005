import json
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from databias.data import (ColumnSpec, SyntheticSpec, TabularDataset, encode, fit_encoder, load_csv,
                           make_synthetic, read_schema, stratified_split, value_matcher, write_schema)
from databias.datasets import load_bundled
from databias.errors import (DataBiasWarning, EmptyDataset, EmptyFitSet, MissingColumn, SchemaError,
                             SchemaMismatch, UnmappableValue)

from oracles import pearson

SCHEMA = (
    ColumnSpec("x", "feature", "numeric"),
    ColumnSpec("c", "feature", "categorical"),
    ColumnSpec("g", "sensitive", "categorical", advantaged_value="a", disadvantaged_value="d"),
    ColumnSpec("t", "target", "categorical", positive_value="1", negative_value="0"),
)


def write_csv(path, header, rows):
    path.write_text("\n".join([",".join(header)] + [",".join(r) for r in rows]) + "\n", encoding="utf-8")
    return path


# -- schema -----------------------------------------------------------------

def test_schema_requires_one_target_and_one_sensitive():
    with pytest.raises(SchemaError):
        TabularDataset(SCHEMA[:2] + SCHEMA[3:], {"x": ["1"], "c": ["u"], "t": ["1"]}, [1], [1])
    with pytest.raises(SchemaError):
        ColumnSpec("t", "target", "categorical")  # no positive value
    with pytest.raises(SchemaError):
        ColumnSpec("x", "feature", "numeric", advantaged_value="a")


def test_schema_json_round_trip(tmp_path):
    path = tmp_path / "schema.json"
    write_schema(SCHEMA, path)
    assert read_schema(path) == SCHEMA
    assert {"name", "role", "kind"} <= set(json.loads(path.read_text())[0])


def test_value_expressions():
    assert value_matcher(">25")("26") and not value_matcher(">25")("25")
    assert value_matcher("<=25")("25") and not value_matcher("<=25")("x")
    # an operand that is not a number keeps the literal meaning
    assert value_matcher(">50K")(">50K") and not value_matcher(">50K")("60K")
    married = value_matcher("Married-civ-spouse|Married-AF-spouse")
    assert married("Married-AF-spouse") and not married("Divorced")


# -- loading ------------------------------------------------------------------

def test_load_two_rows(tmp_path):
    path = write_csv(tmp_path / "d.csv", ["x", "c", "g", "t"], [["1.5", "u", "a", "1"], ["2", "v", "d", "0"]])
    ds = load_csv(path, SCHEMA)
    assert ds.n == 2
    assert ds.y.tolist() == [1, 0] and ds.s.tolist() == [1, 0]


def test_undeclared_target_value(tmp_path):
    path = write_csv(tmp_path / "d.csv", ["x", "c", "g", "t"], [["1", "u", "a", "1"], ["2", "v", "d", "maybe"]])
    with pytest.raises(UnmappableValue, match="t"):
        load_csv(path, SCHEMA)


def test_missing_column_named(tmp_path):
    path = write_csv(tmp_path / "d.csv", ["x", "g", "t"], [["1", "a", "1"]])
    with pytest.raises(MissingColumn, match="'c'"):
        load_csv(path, SCHEMA)


def test_rows_missing_target_or_group_are_dropped(tmp_path):
    rows = [["1", "u", "a", "1"], ["2", "v", "?", "0"], ["3", "u", "d", ""], ["4", "v", "d", "0"]]
    path = write_csv(tmp_path / "d.csv", ["x", "c", "g", "t"], rows)
    with pytest.warns(DataBiasWarning, match="dropped 2"):
        ds = load_csv(path, SCHEMA)
    assert ds.n == 2


def test_empty_file_and_header_only(tmp_path):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    with pytest.raises(EmptyDataset):
        load_csv(empty, SCHEMA)
    with pytest.raises(EmptyDataset):
        load_csv(write_csv(tmp_path / "h.csv", ["x", "c", "g", "t"], []), SCHEMA)


def test_ragged_row_rejected(tmp_path):
    path = write_csv(tmp_path / "d.csv", ["x", "c", "g", "t"], [["1", "u", "a"]])
    with pytest.raises(SchemaMismatch):
        load_csv(path, SCHEMA)


def test_csv_round_trip_is_row_identical(tmp_path, tiny_dataset):
    path = tmp_path / "tiny.csv"
    tiny_dataset.to_csv(path)
    back = load_csv(path, tiny_dataset.schema)
    assert back.rows == tiny_dataset.rows
    assert np.array_equal(back.y, tiny_dataset.y) and np.array_equal(back.s, tiny_dataset.s)


def test_dataset_is_immutable(tiny_dataset):
    with pytest.raises(ValueError):
        tiny_dataset.y[0] = 0
    with pytest.raises(ValueError):
        tiny_dataset.column("age")[0] = "99"


# -- encoding -------------------------------------------------------------------

def _two_value_dataset(values, cats):
    schema = (ColumnSpec("v", "feature", "numeric"), ColumnSpec("k", "feature", "categorical")) + SCHEMA[2:]
    n = len(values)
    cols = {"v": values, "k": cats, "g": ["a", "d"] * (n // 2), "t": ["1", "0"] * (n // 2)}
    return TabularDataset(schema, cols, [1, 0] * (n // 2), [1, 0] * (n // 2))


def test_population_std_standardization():
    ds = _two_value_dataset(["0", "2"], ["x", "y"])
    enc = fit_encoder(ds)
    assert enc.means["v"] == 1.0 and enc.stds["v"] == 1.0
    mat = encode(ds, enc)
    assert mat.features[0, 0] == -1.0
    assert mat.feature_names == ("v", "k=x", "k=y")


def test_unseen_category_is_zero_block():
    ds = _two_value_dataset(["0", "2", "1", "1"], ["x", "y", "x", "z"])
    enc = fit_encoder(ds, [0, 1])
    mat = encode(ds, enc)
    assert mat.feature_names == ("v", "k=x", "k=y")
    assert mat.features[3, 1:].tolist() == [0.0, 0.0]


def test_constant_column_gets_unit_std():
    ds = _two_value_dataset(["5", "5"], ["x", "x"])
    with pytest.warns(DataBiasWarning, match="ZeroVariance"):
        enc = fit_encoder(ds)
    assert enc.stds["v"] == 1.0
    assert encode(ds, enc).features[:, 0].tolist() == [0.0, 0.0]


def test_missing_numeric_encodes_to_zero():
    ds = _two_value_dataset(["1", "3", "?", "2"], ["x", "y", "?", "x"])
    mat = encode(ds, fit_encoder(ds))
    assert mat.features[2].tolist() == [0.0, 0.0, 0.0]


def test_empty_fit_set():
    ds = _two_value_dataset(["0", "2"], ["x", "y"])
    with pytest.raises(EmptyFitSet):
        fit_encoder(ds, [])


def test_target_and_sensitive_only_gives_empty_matrix():
    ds = TabularDataset(SCHEMA[2:], {"g": ["a", "d"], "t": ["1", "0"]}, [1, 0], [1, 0])
    mat = encode(ds, fit_encoder(ds))
    assert mat.features.shape == (2, 0)


def test_encoded_matrix_invariants(synthetic_small):
    ds = synthetic_small
    split = stratified_split(ds, seed=0)
    enc = fit_encoder(ds, split.train)
    mat = encode(ds, enc)
    assert np.all(np.isfinite(mat.features))
    assert "group" not in mat.sources and "y" not in mat.sources
    assert set(mat.decode().values()) == {c.name for c in ds.feature_columns}
    # z-scoring over its own fit set has zero mean
    assert np.all(np.abs(mat.features[split.train].mean(axis=0)) < 1e-9)


def test_encoder_ignores_non_fit_rows(synthetic_small):
    ds = synthetic_small
    split = stratified_split(ds, seed=1)
    enc = fit_encoder(ds, split.train)
    cols = {c.name: ds.column(c.name).copy() for c in ds.schema}
    cols["informative"][split.test] = "1000.0"
    perturbed = TabularDataset(ds.schema, cols, ds.y, ds.s)
    assert fit_encoder(perturbed, split.train) == enc


def test_encode_rejects_incompatible_schema(tiny_dataset):
    enc = fit_encoder(tiny_dataset)
    other = tiny_dataset.without_columns(["job"])
    with pytest.raises(SchemaMismatch):
        encode(other, enc)


# -- splitting -------------------------------------------------------------------------

def test_split_sizes_balanced():
    y = np.repeat([0, 1, 0, 1], 250)
    s = np.repeat([0, 0, 1, 1], 250)
    split = stratified_split((y, s), (0.8, 0.1, 0.1), seed=0)
    assert (len(split.train), len(split.validation), len(split.test)) == (800, 100, 100)


def test_split_deterministic(synthetic_small):
    a = stratified_split(synthetic_small, seed=7)
    b = stratified_split(synthetic_small, seed=7)
    c = stratified_split(synthetic_small, seed=8)
    assert all(np.array_equal(x, z) for x, z in zip(a.parts, b.parts))
    assert not np.array_equal(a.train, c.train)


@given(n=st.integers(12, 400), seed=st.integers(0, 2**31 - 1),
       fracs=st.sampled_from([(0.8, 0.1, 0.1), (0.7, 0.15, 0.15), (0.5, 0.25, 0.25)]))
def test_split_partition_and_stratification(n, seed, fracs):
    rng = np.random.default_rng(seed)
    y, s = rng.integers(0, 2, n), rng.integers(0, 2, n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DataBiasWarning)
        split = stratified_split((y, s), fracs, seed)
    joined = np.concatenate(split.parts)
    assert sorted(joined.tolist()) == list(range(n))
    for yv in (0, 1):
        for sv in (0, 1):
            stratum = set(np.flatnonzero((y == yv) & (s == sv)).tolist())
            if len(stratum) < 3:
                continue
            for part, frac in zip(split.parts, fracs):
                count = len(stratum.intersection(part.tolist()))
                assert abs(count - frac * len(stratum)) <= 1


def test_tiny_stratum_warns():
    y = np.array([0] * 20 + [1])
    s = np.array([0] * 10 + [1] * 10 + [1])
    with pytest.warns(DataBiasWarning, match="StratumTooSmall"):
        split = stratified_split((y, s), seed=0)
    assert split.warnings and sum(len(p) for p in split.parts) == 21


def test_bad_fractions():
    with pytest.raises(ValueError):
        stratified_split((np.zeros(10), np.zeros(10)), (0.5, 0.5, 0.1))


# -- synthetic data -----------------------------------------------------------------------

def test_synthetic_perfect_proxy():
    ds = make_synthetic(SyntheticSpec(n=500, proxy_corr=1.0), seed=0)
    assert np.array_equal(ds.numeric("proxy"), ds.s.astype(float))


def test_synthetic_balanced_groups():
    ds = make_synthetic(SyntheticSpec(n=10000, prevalence_a=0.5), seed=4)
    assert abs(2 * ds.s.mean() - 1) <= 0.03


def test_synthetic_proxy_correlation_and_base_rates():
    ds = make_synthetic(SyntheticSpec(n=20000, proxy_corr=0.6, base_rate_a=0.7, base_rate_d=0.3), seed=2)
    assert abs(pearson(ds.numeric("proxy"), ds.s) - 0.6) < 0.02
    assert abs(ds.y[ds.s == 1].mean() - 0.7) < 0.02 and abs(ds.y[ds.s == 0].mean() - 0.3) < 0.02
    inf = ds.numeric("informative")
    assert abs(inf[ds.y == 1].mean() - 1) < 0.05 and abs(inf[ds.y == 0].std() - 1) < 0.05


def test_synthetic_deterministic_and_validated():
    a = make_synthetic({"n": 50}, seed=1)
    b = make_synthetic({"n": 50}, seed=1)
    assert a.rows == b.rows
    with pytest.raises(ValueError):
        SyntheticSpec(n=5)
    with pytest.raises(ValueError):
        SyntheticSpec(proxy_corr=1.5)


# -- bundled benchmark copies ------------------------------------------------------------

# group prevalence and group-wise positive rates of the benchmark datasets
TABLE_STATS = [
    ("adult", "gender", 45222, 0.68, 0.31, 0.11),
    ("adult", "marital-status", 45222, 0.48, 0.45, 0.07),
    ("german", "age", 1000, 0.81, 0.73, 0.58),
    ("compas", "race", 5278, None, 0.61, 0.48),
]


@pytest.mark.parametrize("name,sensitive,n,p_a,rate_a,rate_d", TABLE_STATS)
def test_bundled_dataset_statistics(name, sensitive, n, p_a, rate_a, rate_d):
    ds = load_bundled(name, sensitive)
    assert ds.n == n
    if p_a is not None:
        assert abs(ds.s.mean() - p_a) <= 0.01
    assert abs(ds.y[ds.s == 1].mean() - rate_a) <= 0.01
    assert abs(ds.y[ds.s == 0].mean() - rate_d) <= 0.01


def test_compas_group_shares():
    # Caucasian defendants form 0.40 of the filtered cohort, African-American 0.60
    ds = load_bundled("compas", "race")
    assert abs(ds.s.mean() - 0.40) <= 0.01


def test_german_age_threshold():
    ds = load_bundled("german", "age")
    assert ds.sensitive.advantaged_value == ">25"
    age = ds.numeric("age")
    assert np.array_equal(ds.s == 1, age > 25)
    assert "age" not in {c.name for c in ds.feature_columns}
