"""Public benchmark datasets: schemas, download, preprocessing and cached copies.

Each dataset is prepared into a single headered CSV plus one schema JSON per
selectable sensitive attribute. The package ships prepared copies of Adult,
German and Compas so experiments can run without network access.
"""
from __future__ import annotations

import csv
import gzip
import hashlib
import io
import logging
import os
import shutil
import statistics
import tempfile
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime
from importlib import resources
from pathlib import Path
from typing import Callable

from .data import ColumnSpec, TabularDataset, load_csv, validate_schema, write_schema
from .errors import ChecksumMismatch, DataError, NetworkError, SchemaError

log = logging.getLogger(__name__)

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"


@dataclass(frozen=True)
class SensitiveOption:
    column: str
    advantaged: str
    disadvantaged: str


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    urls: tuple[str, ...]
    columns: tuple[ColumnSpec, ...]  # every column, sensitive ones with role "feature"
    sensitive: dict  # option name -> SensitiveOption
    default_sensitive: str
    prepare: Callable[[list[bytes]], list[list[str]]]
    checksums: dict = field(default_factory=dict)

    def schema(self, sensitive: str | None = None) -> tuple[ColumnSpec, ...]:
        option_name = sensitive or self.default_sensitive
        try:
            option = self.sensitive[option_name]
        except KeyError:
            raise SchemaError(
                f"{self.name}: unknown sensitive attribute {option_name!r}; "
                f"choose from {sorted(self.sensitive)}") from None
        cols = []
        for c in self.columns:
            if c.name == option.column:
                c = ColumnSpec(c.name, "sensitive", c.kind,
                               advantaged_value=option.advantaged,
                               disadvantaged_value=option.disadvantaged)
            cols.append(c)
        return validate_schema(cols)

    def schema_filename(self, sensitive: str | None = None) -> str:
        if sensitive is None or sensitive == self.default_sensitive:
            return f"{self.name}.schema.json"
        return f"{self.name}.{sensitive}.schema.json"


def _num(name, role="feature"):
    return ColumnSpec(name, role, "numeric")


def _cat(name, role="feature"):
    return ColumnSpec(name, role, "categorical")


# -- Adult ----------------------------------------------------------------------

ADULT_RAW_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
    "occupation", "relationship", "race", "gender", "capital-gain", "capital-loss",
    "hours-per-week", "native-country", "income",
]


def prepare_adult(raw_files: list[bytes]) -> list[list[str]]:
    """Concatenate adult.data and adult.test; drop rows with any missing cell.

    The test file has a banner line and labels with a trailing period.
    """
    rows = [ADULT_RAW_COLUMNS]
    for blob in raw_files:
        for line in blob.decode("utf-8").splitlines():
            if not line.strip() or line.startswith("|"):
                continue
            cells = [c.strip() for c in line.split(",")]
            if len(cells) != len(ADULT_RAW_COLUMNS):
                continue
            cells[-1] = cells[-1].rstrip(".")
            if "?" in cells:
                continue
            rows.append(cells)
    return rows


ADULT = DatasetInfo(
    name="adult",
    urls=(f"{UCI}/adult/adult.data", f"{UCI}/adult/adult.test"),
    columns=(
        _num("age"), _cat("workclass"), _num("fnlwgt"), _cat("education"),
        _num("education-num"), _cat("marital-status"), _cat("occupation"),
        _cat("relationship"), _cat("race"), _cat("gender"), _num("capital-gain"),
        _num("capital-loss"), _num("hours-per-week"), _cat("native-country"),
        ColumnSpec("income", "target", "categorical", positive_value=">50K", negative_value="<=50K"),
    ),
    sensitive={
        "gender": SensitiveOption("gender", "Male", "Female"),
        "marital-status": SensitiveOption(
            "marital-status",
            "Married-civ-spouse|Married-AF-spouse|Married-spouse-absent",
            "Never-married|Divorced|Separated|Widowed"),
    },
    default_sensitive="gender",
    prepare=prepare_adult,
)


# -- German credit ----------------------------------------------------------------

GERMAN_RAW_COLUMNS = [
    "status", "duration", "credit_history", "purpose", "amount", "savings",
    "employment_duration", "installment_rate", "personal_status_sex", "other_debtors",
    "present_residence", "property", "age", "other_installment_plans", "housing",
    "number_credits", "job", "people_liable", "telephone", "foreign_worker", "credit_risk",
]


def prepare_german(raw_files: list[bytes]) -> list[list[str]]:
    rows = [GERMAN_RAW_COLUMNS]
    for line in raw_files[0].decode("utf-8").splitlines():
        cells = line.split()
        if len(cells) == len(GERMAN_RAW_COLUMNS):
            rows.append(cells)
    return rows


GERMAN = DatasetInfo(
    name="german",
    urls=(f"{UCI}/statlog/german/german.data",),
    columns=(
        _cat("status"), _num("duration"), _cat("credit_history"), _cat("purpose"),
        _num("amount"), _cat("savings"), _cat("employment_duration"), _cat("installment_rate"),
        _cat("personal_status_sex", "ignored"), _cat("other_debtors"), _cat("present_residence"),
        _cat("property"), _num("age"), _cat("other_installment_plans"), _cat("housing"),
        _cat("number_credits"), _cat("job"), _cat("people_liable"), _cat("telephone"),
        _cat("foreign_worker", "ignored"),
        ColumnSpec("credit_risk", "target", "categorical", positive_value="1", negative_value="2"),
    ),
    sensitive={"age": SensitiveOption("age", ">25", "<=25")},
    default_sensitive="age",
    prepare=prepare_german,
)


# -- Compas -------------------------------------------------------------------------

COMPAS_COLUMNS = [
    "age", "c_charge_degree", "diff_custody", "diff_jail", "sex", "priors_count",
    "length_of_stay", "v_score_text", "race", "two_year_recid",
]


def _days(later: str, earlier: str) -> float:
    fmt = "%Y-%m-%d %H:%M:%S" if " " in later else "%Y-%m-%d"
    delta = datetime.strptime(later, fmt) - datetime.strptime(earlier, fmt)
    return delta.total_seconds() / 86400.0


def prepare_compas(raw_files: list[bytes]) -> list[list[str]]:
    """ProPublica two-year file, standard screening filters, two races only."""
    reader = csv.reader(io.StringIO(raw_files[0].decode("utf-8")))
    header = next(reader)
    # the file repeats some column names; keep the first occurrence
    pos = {}
    for i, h in enumerate(header):
        pos.setdefault(h, i)
    rows = [COMPAS_COLUMNS]
    for r in reader:
        get = lambda k: r[pos[k]]  # noqa: E731
        try:
            screening = int(get("days_b_screening_arrest"))
        except ValueError:
            continue
        if not -30 <= screening <= 30 or get("is_recid") == "-1":
            continue
        if get("c_charge_degree") == "O" or get("score_text") == "N/A":
            continue
        if get("race") not in ("Caucasian", "African-American"):
            continue
        if not (get("c_jail_in") and get("c_jail_out") and get("in_custody") and get("out_custody")):
            continue
        diff_jail = _days(get("c_jail_out"), get("c_jail_in"))
        rows.append([
            get("age"), get("c_charge_degree"),
            f"{_days(get('out_custody'), get('in_custody')):.0f}",
            f"{diff_jail:.4f}", get("sex"), get("priors_count"),
            f"{max(diff_jail, 0.0):.0f}", get("v_score_text"), get("race"),
            get("two_year_recid"),
        ])
    return rows


COMPAS = DatasetInfo(
    name="compas",
    urls=("https://raw.githubusercontent.com/propublica/compas-analysis/master/compas-scores-two-years.csv",),
    columns=(
        _num("age"), _cat("c_charge_degree"), _num("diff_custody"), _num("diff_jail"),
        _cat("sex"), _num("priors_count"), _num("length_of_stay"), _cat("v_score_text"),
        _cat("race"),
        ColumnSpec("two_year_recid", "target", "categorical", positive_value="0", negative_value="1"),
    ),
    sensitive={"race": SensitiveOption("race", "Caucasian", "African-American")},
    default_sensitive="race",
    prepare=prepare_compas,
)


# -- Communities and Crime ---------------------------------------------------------

CRIME_NON_PREDICTIVE = 5  # state, county, community, communityname, fold
CRIME_SENSITIVE = "racePctWhite"


def _crime_names(names_blob: bytes) -> list[str]:
    names = []
    for line in names_blob.decode("utf-8", errors="replace").splitlines():
        if line.startswith("@attribute"):
            names.append(line.split()[1])
    return names


def prepare_crime(raw_files: list[bytes]) -> list[list[str]]:
    """Keep predictive numeric columns with at most 50% missing; binarize the target.

    The target is ``low`` when ViolentCrimesPerPop is at or below its median.
    """
    data_blob, names_blob = raw_files
    names = _crime_names(names_blob)
    lines = [ln.split(",") for ln in data_blob.decode("utf-8").splitlines() if ln.strip()]
    if not names or any(len(r) != len(names) for r in lines):
        raise DataError("crime: data file does not match attribute names")
    target_idx = names.index("ViolentCrimesPerPop")
    keep = []
    for j in range(CRIME_NON_PREDICTIVE, len(names)):
        if j == target_idx:
            continue
        missing = sum(r[j].strip() == "?" for r in lines)
        if missing <= 0.5 * len(lines):
            keep.append(j)
    median = statistics.median(float(r[target_idx]) for r in lines)
    rows = [[names[j] for j in keep] + ["crime_rate"]]
    for r in lines:
        label = "low" if float(r[target_idx]) <= median else "high"
        rows.append([r[j].strip() for j in keep] + [label])
    return rows


def crime_schema_columns(header: list[str]) -> tuple[ColumnSpec, ...]:
    cols = [_num(h) for h in header[:-1]]
    cols.append(ColumnSpec("crime_rate", "target", "categorical", positive_value="low", negative_value="high"))
    return tuple(cols)


CRIME = DatasetInfo(
    name="crime",
    urls=(f"{UCI}/communities/communities.data", f"{UCI}/communities/communities.names"),
    columns=(),  # derived from the downloaded header
    sensitive={"race": SensitiveOption(CRIME_SENSITIVE, ">=0.75", "<0.75")},
    default_sensitive="race",
    prepare=prepare_crime,
)


REGISTRY: dict[str, DatasetInfo] = {d.name: d for d in (ADULT, GERMAN, COMPAS, CRIME)}
BUNDLED = ("adult", "german", "compas")


def dataset_info(name: str) -> DatasetInfo:
    try:
        return REGISTRY[name]
    except KeyError:
        raise SchemaError(f"unknown dataset {name!r}; known: {sorted(REGISTRY)}") from None


def _schemas_for(info: DatasetInfo, header: list[str]) -> dict[str, tuple[ColumnSpec, ...]]:
    if info.name == "crime":
        info = DatasetInfo(info.name, info.urls, crime_schema_columns(header), info.sensitive,
                           info.default_sensitive, info.prepare)
    return {opt: info.schema(opt) for opt in info.sensitive}


# -- fetching ------------------------------------------------------------------------

def _download(url: str, timeout: float) -> bytes:
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return resp.read()
    except (urllib.error.URLError, OSError, ValueError) as exc:
        raise NetworkError(f"failed to download {url}: {exc}") from exc


def fetch_dataset(name: str, out_dir, *, timeout: float = 30.0,
                  checksums: dict | None = None,
                  downloader: Callable[[str, float], bytes] = _download) -> Path:
    """Download, prepare and write ``<name>.csv`` plus schema files into ``out_dir``.

    Nothing is left in ``out_dir`` if any download or check fails.
    """
    info = dataset_info(name)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pinned = dict(info.checksums)
    pinned.update(checksums or {})
    blobs = []
    for url in info.urls:
        blob = downloader(url, timeout)
        if not blob:
            raise NetworkError(f"{url}: empty response")
        expected = pinned.get(url)
        if expected is not None:
            actual = hashlib.sha256(blob).hexdigest()
            if actual != expected:
                raise ChecksumMismatch(f"{url}: sha256 {actual} != pinned {expected}")
        blobs.append(blob)
    rows = info.prepare(blobs)
    return _write_prepared(info, rows, out_dir)


def _write_prepared(info: DatasetInfo, rows: list[list[str]], out_dir: Path) -> Path:
    staging = Path(tempfile.mkdtemp(prefix=f".{info.name}-", dir=out_dir))
    try:
        csv_path = staging / f"{info.name}.csv"
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            csv.writer(fh).writerows(rows)
        if csv_path.stat().st_size == 0 or len(rows) < 2:
            raise DataError(f"{info.name}: prepared file is empty")
        for opt, schema in _schemas_for(info, rows[0]).items():
            write_schema(schema, staging / info.schema_filename(opt))
        final = out_dir / f"{info.name}.csv"
        for item in sorted(staging.iterdir()):
            os.replace(item, out_dir / item.name)
        return final
    finally:
        shutil.rmtree(staging, ignore_errors=True)


def prepared_files(name: str, out_dir) -> list[Path]:
    info = dataset_info(name)
    out_dir = Path(out_dir)
    files = [out_dir / f"{name}.csv"]
    files += [out_dir / info.schema_filename(opt) for opt in info.sensitive]
    return files


# -- bundled copies --------------------------------------------------------------------

def _bundled_path(name: str):
    return resources.files("databias").joinpath("_data", f"{name}.csv.gz")


def has_bundled(name: str) -> bool:
    return name in BUNDLED and _bundled_path(name).is_file()


def install_bundled(name: str, out_dir) -> Path:
    """Write the packaged prepared copy of ``name`` as if it had been fetched."""
    if not has_bundled(name):
        raise NetworkError(f"no bundled copy of {name!r}")
    info = dataset_info(name)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with _bundled_path(name).open("rb") as fh:
        text = gzip.decompress(fh.read()).decode("utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    return _write_prepared(info, rows, out_dir)


def load_bundled(name: str, sensitive: str | None = None) -> TabularDataset:
    """Load the packaged prepared copy with the chosen sensitive attribute."""
    info = dataset_info(name)
    if not has_bundled(name):
        raise DataError(f"no bundled copy of {name!r}; use fetch_dataset")
    schema = info.schema(sensitive)
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / f"{name}.csv"
        with _bundled_path(name).open("rb") as fh, open(path, "wb") as out:
            out.write(gzip.decompress(fh.read()))
        ds = load_csv(path, schema, name=f"{name}/{sensitive or info.default_sensitive}")
    return ds


def build_bundled_copy(name: str, raw_files: list[bytes], dest_dir) -> Path:
    """Prepare raw source files and store them gzip-compressed (maintainer tool)."""
    info = dataset_info(name)
    rows = info.prepare(raw_files)
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    dest = Path(dest_dir) / f"{name}.csv.gz"
    with gzip.GzipFile(dest, "wb", mtime=0) as fh:
        fh.write(buf.getvalue().encode("utf-8"))
    return dest


def sensitive_option(dataset_name: str, option: str) -> SensitiveOption:
    info = dataset_info(dataset_name)
    if option not in info.sensitive:
        raise SchemaError(f"{dataset_name}: unknown sensitive attribute {option!r}")
    return info.sensitive[option]


def known_sensitive_options() -> dict[str, SensitiveOption]:
    """All registered sensitive options keyed by column name."""
    out = {}
    for info in REGISTRY.values():
        for opt in info.sensitive.values():
            out.setdefault(opt.column, opt)
    return out
