import os

import pytest
from hypothesis import settings

from databias.data import ColumnSpec, SyntheticSpec, TabularDataset, make_synthetic

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def synthetic_small():
    return make_synthetic(SyntheticSpec(n=2000, proxy_corr=0.5), seed=3)


@pytest.fixture
def tiny_dataset():
    """Eight rows with both groups and both classes, one numeric and one categorical feature."""
    schema = (
        ColumnSpec("age", "feature", "numeric"),
        ColumnSpec("job", "feature", "categorical"),
        ColumnSpec("sex", "sensitive", "categorical", advantaged_value="m", disadvantaged_value="f"),
        ColumnSpec("label", "target", "categorical", positive_value="yes", negative_value="no"),
    )
    cols = {
        "age": ["20", "30", "40", "50", "25", "35", "45", "55"],
        "job": ["a", "b", "a", "c", "b", "a", "c", "b"],
        "sex": ["m", "m", "m", "m", "f", "f", "f", "f"],
        "label": ["yes", "no", "yes", "no", "yes", "yes", "no", "no"],
    }
    y = [1 if v == "yes" else 0 for v in cols["label"]]
    s = [1 if v == "m" else 0 for v in cols["sex"]]
    return TabularDataset(schema, cols, y, s, name="tiny")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")
