"""Command line entry point: ``dpsubkmeans {run,ratios,blobs,export-datasets}``."""

import argparse
import logging
import sys
from pathlib import Path

import yaml

from .datasets import DataError, export_reference_datasets, make_blobs, write_csv
from .harness import ConfigError, SweepConfig, emit_results, format_ratios, read_agg, report_ratios, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_PARTIAL = 0, 1, 2, 3


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _strs(text):
    return [x.strip() for x in text.split(",") if x.strip()]


def build_parser():
    p = argparse.ArgumentParser(prog="dpsubkmeans", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an epsilon / internalK sweep")
    run.add_argument("--config", type=Path, help="flat YAML mapping of sweep settings")
    run.add_argument("--dataset", help="CSV path or 'synthetic'")
    run.add_argument("--name", help="dataset name (iris, wine, breast_cancer, digits enable shape checks)")
    run.add_argument("--label-column", dest="label_column", help="column index or header name to drop")
    run.add_argument("--k", type=int)
    run.add_argument("--algorithms", type=_strs)
    run.add_argument("--eps-grid", dest="eps_grid", type=_floats)
    run.add_argument("--internal-k", dest="internal_k", type=_ints)
    run.add_argument("--repeats", type=int)
    run.add_argument("--iters", type=int)
    run.add_argument("--rho", type=float)
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    run.add_argument("--workers", type=int)

    ratios = sub.add_parser("ratios", help="improvement ratios from an agg.csv (or its directory)")
    ratios.add_argument("path", type=Path)

    blobs = sub.add_parser("blobs", help="write a synthetic blob fixture as CSV")
    blobs.add_argument("--n-per-blob", type=int, default=50)
    blobs.add_argument("--centers", default="0,0;10,0;0,10", help="';'-separated points, ','-separated coords")
    blobs.add_argument("--spread", type=float, default=1.0)
    blobs.add_argument("--seed", type=int, default=0)
    blobs.add_argument("--out", type=Path, required=True)

    exp = sub.add_parser("export-datasets", help="write the four reference datasets bundled with scikit-learn")
    exp.add_argument("out", type=Path)
    return p


_RUN_KEYS = ("dataset", "name", "label_column", "k", "algorithms", "eps_grid", "internal_k",
             "repeats", "iters", "rho", "seed", "out", "workers")


def config_from_args(args):
    settings = {}
    if args.config is not None:
        loaded = yaml.safe_load(args.config.read_text()) or {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"{args.config}: expected a flat key/value mapping")
        settings.update({k.replace("-", "_"): v for k, v in loaded.items()})
    for key in _RUN_KEYS:
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    for key in ("eps_grid", "internal_k", "algorithms"):
        if isinstance(settings.get(key), (int, float, str)):
            settings[key] = [settings[key]]
    if settings.get("label_column") is not None:
        settings["label_column"] = str(settings["label_column"])
    return SweepConfig.from_mapping(settings).resolved()


def cmd_run(args):
    try:
        cfg = config_from_args(args)
    except (ConfigError, OSError, yaml.YAMLError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        outcome = run_sweep(cfg)
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if not outcome.records:
        print("every cell failed; nothing written", file=sys.stderr)
        return EXIT_PARTIAL
    paths = emit_results(outcome.records, cfg.out, outcome.failures)
    print(f"{len(outcome.records)} runs written to {paths['raw']}")
    violations = sum(r.invariant_violations for r in outcome.records)
    print(f"invariant violations: {violations}")
    text = format_ratios(report_ratios(read_agg(paths["agg"])))
    if text:
        print(text)
    if outcome.failures:
        print(f"{len(outcome.failures)} cells failed, see {paths['failures']}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_ratios(args):
    path = args.path / "agg.csv" if args.path.is_dir() else args.path
    try:
        summaries = read_agg(path)
    except (OSError, KeyError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(format_ratios(report_ratios(summaries)))
    return EXIT_OK


def cmd_blobs(args):
    try:
        centers = [[float(c) for c in pt.split(",")] for pt in args.centers.split(";") if pt.strip()]
        data = make_blobs(args.n_per_blob, centers, args.spread, args.seed)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(data, args.out, labels=data.labels)
    print(f"wrote {data.n_points} points to {args.out}")
    return EXIT_OK


def cmd_export(args):
    for name, path in export_reference_datasets(args.out).items():
        print(f"{name}: {path}")
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": cmd_run, "ratios": cmd_ratios, "blobs": cmd_blobs, "export-datasets": cmd_export}
    return handler[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
