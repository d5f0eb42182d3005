"""Command-line interface: ``databias {fetch,inject,profile,experiment,compare}``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 runtime error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import datasets
from .data import read_schema, load_csv, write_schema
from .detect import DataBiasProfile, DEFAULT_THRESHOLDS, build_profile, compare_profiles
from .errors import DataBiasError, DataError, InvalidBias, MetricError, ProfileError, RepetitionFailed
from .experiment import emit_table, load_bundled_config, load_config, run_to_directory, switch_sensitive
from .inject import apply_bias, parse_bias
from .model import MODEL_KINDS, TrainConfig
from .radar import write_radar

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_dataset(data, schema):
    return load_csv(Path(data), read_schema(Path(schema)))


def cmd_fetch(args) -> int:
    out = Path(args.out)
    existing = datasets.prepared_files(args.name, out)
    if not args.force and all(p.is_file() for p in existing):
        print(f"{args.name}: skipped (exists) in {out}")
        return EXIT_OK
    try:
        path = datasets.fetch_dataset(args.name, out, timeout=args.timeout)
        print(f"{args.name}: downloaded to {path}")
    except DataBiasError as exc:
        if not (args.allow_cache and datasets.has_bundled(args.name)):
            raise
        path = datasets.install_bundled(args.name, out)
        print(f"{args.name}: download failed ({exc}); installed bundled copy at {path}")
    return EXIT_OK


def cmd_inject(args) -> int:
    try:
        spec = parse_bias(args.bias, seed=args.seed)
    except InvalidBias as exc:
        raise UsageError(str(exc)) from None
    ds = _load_dataset(args.data, args.schema)
    biased, report = apply_bias(ds, spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    biased.to_csv(out)
    schema_path = out.with_name(out.stem + ".schema.json")
    write_schema(biased.schema, schema_path)
    body = report.to_dict()
    body.update(bias=args.bias, seed=args.seed, rows_in=ds.n, rows_out=biased.n,
                output=out.name, schema=schema_path.name)
    (out.parent / "report.json").write_text(_dump(body), encoding="utf-8")
    print(_dump(body), end="")
    return EXIT_OK


def cmd_profile(args) -> int:
    ds = switch_sensitive(_load_dataset(args.data, args.schema), args.sensitive)
    extra = {} if args.learning_rate is None else {"learning_rate": args.learning_rate}
    config = TrainConfig(model_kind=args.model, **extra)
    profile = build_profile(ds, args.sensitive, config, seed=args.seed,
                            dataset_id=args.dataset_id or Path(args.data).stem)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(profile.to_json(), encoding="utf-8")
    if args.svg:
        write_radar([profile], args.svg)
    print(profile.to_json(), end="")
    return EXIT_OK


def cmd_experiment(args) -> int:
    path = Path(args.config)
    config = load_config(path) if path.is_file() else load_bundled_config(args.config)
    result = run_to_directory(config, args.out, workers=args.workers)
    print(emit_table(result, args.format), end="")
    return EXIT_OK


def _read_profile(path) -> DataBiasProfile:
    with open(path, encoding="utf-8") as fh:
        try:
            return DataBiasProfile.from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON ({exc})") from None
        except TypeError as exc:
            raise DataError(f"{path}: {exc}") from None


def cmd_compare(args) -> int:
    p1, p2 = (_read_profile(p) for p in args.profiles)
    thresholds = {k: v for k, v in (("sauc", args.sauc_gap), ("sd", args.sd_gap), ("rd", args.rd_gap))
                  if v is not None}
    diff = compare_profiles(p1, p2, thresholds)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(_dump(diff), encoding="utf-8")
    print(_dump(diff), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="databias", description="Inject, measure and profile data bias.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("fetch", help="download a dataset and write its CSV and schema files")
    p.add_argument("name", choices=sorted(datasets.REGISTRY), help="dataset to fetch")
    p.add_argument("--out", required=True, help="directory receiving <name>.csv and schema JSON files")
    p.add_argument("--timeout", type=float, default=30.0, help="per-download timeout in seconds (default 30)")
    p.add_argument("--allow-cache", action="store_true",
                   help="fall back to the bundled prepared copy when the download fails")
    p.add_argument("--force", action="store_true", help="fetch again even if the files already exist")
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("inject", help="apply one bias to a dataset and write the result")
    p.add_argument("--data", required=True, help="input CSV file")
    p.add_argument("--schema", required=True, help="schema JSON for the input CSV")
    p.add_argument("--bias", required=True,
                   help="bias as name:value, one of underrep:U, flip:F, proxy-add:RHO, proxy-drop:K")
    p.add_argument("--seed", type=int, required=True, help="random seed for the injection")
    p.add_argument("--out", required=True,
                   help="output CSV; report.json and <stem>.schema.json are written beside it")
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("profile", help="compute a Data Bias Profile (RD, SD, sAUC)")
    p.add_argument("--data", required=True, help="input CSV file")
    p.add_argument("--schema", required=True, help="schema JSON for the input CSV")
    p.add_argument("--sensitive", default=None,
                   help="sensitive column to profile (default: the one named in the schema)")
    p.add_argument("--model", choices=MODEL_KINDS, default="logistic", help="classifier family (default logistic)")
    p.add_argument("--learning-rate", type=float, default=None,
                   help="gradient descent step size for the logistic model (default 0.1)")
    p.add_argument("--seed", type=int, required=True, help="seed for the split and model training")
    p.add_argument("--dataset-id", default=None, help="identifier stored in the profile (default: CSV stem)")
    p.add_argument("--out", required=True, help="output profile JSON")
    p.add_argument("--svg", default=None, help="optional radar chart SVG path")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("experiment", help="run a seeded bias grid and write a results directory")
    p.add_argument("--config", required=True, help="experiment config JSON, or the name of a bundled config")
    p.add_argument("--out", required=True, help="results directory")
    p.add_argument("--workers", type=int, default=1, help="repetitions run concurrently (default 1)")
    p.add_argument("--format", choices=("text", "csv"), default="text",
                   help="format of the summary table printed to stdout (default text)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("compare", help="diff two Data Bias Profiles")
    p.add_argument("--profiles", nargs=2, required=True, metavar=("A", "B"),
                   help="two profile JSON files; differences are A minus B")
    p.add_argument("--out", required=True, help="output diff JSON")
    p.add_argument("--sauc-gap", type=float, default=None,
                   help=f"sAUC difference classed as a proxy change (default {DEFAULT_THRESHOLDS['sauc']})")
    p.add_argument("--sd-gap", type=float, default=None,
                   help=f"SD difference classed as a label-bias change (default {DEFAULT_THRESHOLDS['sd']})")
    p.add_argument("--rd-gap", type=float, default=None,
                   help=f"RD difference classed as a representation change (default {DEFAULT_THRESHOLDS['rd']})")
    p.set_defaults(func=cmd_compare)
    return parser


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (RepetitionFailed, ProfileError)):
        return _exit_code(exc.cause)
    if isinstance(exc, (DataError, MetricError, FileNotFoundError)):
        return EXIT_DATA
    return EXIT_RUNTIME


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"databias: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataBiasError, OSError) as exc:
        print(f"databias: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except KeyboardInterrupt:
        print("databias: interrupted", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
