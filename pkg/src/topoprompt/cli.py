"""Command-line entry point: ``topoprompt {analyze,optimize,trajectory,correlate,render}``.

Every command prints one ``key=value`` summary line on stdout; diagnostics go
to stderr. Exit codes: 0 success, 1 runtime/numeric failure, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from .errors import EvolutionAborted, InputError, NumericError, SnapshotFormatError, SnapshotParseError
from .evolve import (
    DEFAULT_LEARNING_RATE,
    SGD,
    Adam,
    Anchor,
    EvolveConfig,
    descend,
    format_metrics_csv,
    read_metrics_csv,
    records_from_manifest,
    snapshot_name,
    trajectory_metrics,
    write_trajectory,
)
from .homology import PersistenceDiagram, diagram
from .metrics import summarize
from .pointcloud import gaussian_init, load_snapshot, pca_project
from .render import render
from .stats import correlate_trajectory, format_report_csv
from .tsloss import LossConfig, ts_loss

OUTPUT_DIR_ENV = "TOPOPROMPT_OUTPUT_DIR"

log = logging.getLogger("topoprompt")


class CommandError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _default_outdir():
    return os.environ.get(OUTPUT_DIR_ENV) or "."


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_json(path, obj):
    _write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _emit(**fields):
    print(" ".join(f"{k}={v}" for k, v in fields.items()))


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_analyze(args):
    cloud = load_snapshot(args.snapshot, args.format, header=args.header)
    dgm = diagram(cloud)
    summary = summarize(cloud, args.noise_floor)
    breakdown = None
    if args.emit_loss or args.emit_gradient:
        breakdown = ts_loss(cloud, LossConfig.adaptive(cloud))

    outdir = args.output_dir or _default_outdir()
    os.makedirs(outdir, exist_ok=True)
    _write_json(os.path.join(outdir, "summary.json"), summary.to_dict(step=0))
    _write_text(os.path.join(outdir, "diagram.csv"), dgm.to_csv())
    if breakdown is not None:
        _write_json(os.path.join(outdir, "loss.json"), breakdown.to_dict(include_gradient=args.emit_gradient))
    _emit(
        command="analyze",
        n=cloud.n,
        d=cloud.d,
        h0_count=summary.h0_count,
        h1_count=summary.h1_count,
        persistence_entropy=repr(summary.persistence_entropy),
        outdir=outdir,
    )


def _loss_config(args, cloud):
    return LossConfig.adaptive(
        cloud,
        tau=args.tau,
        alpha=args.alpha,
        lambda_ts=args.lambda_ts,
        beta_h0=args.beta_h0,
        beta_h1=args.beta_h1,
        lambda_repel=args.lambda_repel,
        lambda_attract=args.lambda_attract,
    )


def cmd_optimize(args):
    if args.init_gaussian is not None:
        n, d, sigma, seed = args.init_gaussian
        try:
            cloud = gaussian_init(int(n), int(d), float(sigma), int(seed))
        except ValueError as exc:
            raise CommandError(f"--init-gaussian expects N D SIGMA SEED: {exc}", 2) from None
    elif args.snapshot is not None:
        cloud = load_snapshot(args.snapshot, args.format, header=args.header)
    else:
        raise CommandError("optimize needs a snapshot path or --init-gaussian N D SIGMA SEED", 2)

    surrogate = None
    if args.surrogate_target is not None:
        target = load_snapshot(args.surrogate_target, header=args.header)
        surrogate = Anchor(target, args.surrogate_weight)
    if args.optimizer == "adam":
        optimizer = Adam(*args.adam_betas, args.adam_eps)
    else:
        optimizer = SGD(backtracking=args.backtracking)
    lr = args.lr if args.lr is not None else DEFAULT_LEARNING_RATE[args.optimizer]
    config = EvolveConfig(
        steps=args.steps,
        learning_rate=lr,
        snapshot_every=args.snapshot_every,
        loss_config=_loss_config(args, cloud),
        surrogate=surrogate,
        optimizer=optimizer,
        noise_floor=args.noise_floor,
    )

    outdir = args.output_dir or _default_outdir()
    try:
        records = descend(cloud, config)
    except EvolutionAborted as exc:
        if exc.records:
            write_trajectory(exc.records, outdir)
        raise
    paths = write_trajectory(records, outdir)
    final = ts_loss(records[-1].cloud, config.loss_config)
    _write_json(os.path.join(outdir, "loss.json"), final.to_dict(include_gradient=args.emit_gradient))
    _emit(
        command="optimize",
        steps=args.steps,
        records=len(records),
        initial_ts_loss=repr(records[0].ts_loss),
        final_ts_loss=repr(records[-1].ts_loss),
        manifest=paths["manifest"],
        metrics=paths["metrics"],
    )


def cmd_trajectory(args):
    try:
        records = records_from_manifest(args.manifest, args.noise_floor)
    except FileNotFoundError as exc:
        raise CommandError(str(exc), 2) from None
    outdir = args.output_dir or _default_outdir()
    os.makedirs(outdir, exist_ok=True)
    out = args.output or os.path.join(outdir, "trajectory_metrics.csv")
    _write_text(out, format_metrics_csv(trajectory_metrics(records)))
    if args.project_pca:
        for r in records:
            proj = pca_project(r.cloud, 2)
            name = "pca_" + snapshot_name(r.step).replace("snapshot_", "step_")
            write_snapshot_matrix(os.path.join(outdir, name), proj)
    _emit(command="trajectory", records=len(records), metrics=out, pca=int(bool(args.project_pca)))


def write_snapshot_matrix(path, matrix):
    _write_text(path, "".join(",".join(format(float(v), ".17g") for v in row) + "\n" for row in matrix))


def _read_accuracy(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError(f"{path}: no accuracy values")
    column = 0
    start = 0
    try:
        float(rows[0][0])
    except ValueError:
        header = [h.strip() for h in rows[0]]
        column = header.index("accuracy") if "accuracy" in header else 0
        start = 1
    values = []
    for lineno, row in enumerate(rows[start:], start=start + 1):
        try:
            values.append(float(row[column]))
        except (ValueError, IndexError):
            raise SnapshotParseError(f"{path}: bad accuracy value", row=lineno, column=column + 1) from None
    return np.array(values)


def cmd_correlate(args):
    metrics = read_metrics_csv(args.metrics)
    accuracy = _read_accuracy(args.accuracy)
    if len(metrics) != len(accuracy):
        raise CommandError(
            f"length mismatch: {len(metrics)} metric rows vs {len(accuracy)} accuracy values", 2
        )
    report = correlate_trajectory(metrics, accuracy, columns=args.columns)
    outdir = args.output_dir or _default_outdir()
    os.makedirs(outdir, exist_ok=True)
    out = args.output or os.path.join(outdir, "correlation.csv")
    _write_text(out, format_report_csv(report))
    na = sum(r["rho"] is None for r in report)
    _emit(command="correlate", metrics=len(report), rows=len(accuracy), na=na, report=out)


def cmd_render(args):
    with open(args.diagram, encoding="utf-8") as fh:
        dgm = PersistenceDiagram.from_csv(fh.read())
    svg = render(dgm, args.mode)
    if args.output:
        out = args.output
    else:
        outdir = args.output_dir or _default_outdir()
        os.makedirs(outdir, exist_ok=True)
        out = os.path.join(outdir, f"{args.mode}.svg")
    _write_text(out, svg)
    _emit(command="render", mode=args.mode, pairs=len(dgm), svg=out)


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _noise_floor(text):
    value = float(text)
    if not 0 <= value < 1:
        raise argparse.ArgumentTypeError("noise floor must lie in [0, 1)")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="topoprompt",
        description="Persistent-homology analysis and topological regularization of point clouds.",
        epilog=f"Environment: {OUTPUT_DIR_ENV} overrides the default output directory (the current directory).",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_out(p, short=False):
        flags = ("-o", "--output-dir") if short else ("--output-dir",)
        p.add_argument(*flags, default=None, help=f"output directory (default: ${OUTPUT_DIR_ENV} or .)")

    def snapshot_opts(p):
        p.add_argument("--format", choices=("csv", "json"), default=None, help="snapshot format (default: by extension)")
        p.add_argument("--header", action="store_true", help="skip the first CSV row")

    p = sub.add_parser("analyze", help="persistence diagram and topology summary of one snapshot")
    p.add_argument("snapshot")
    snapshot_opts(p)
    p.add_argument("--noise-floor", type=_noise_floor, default=0.0, help="relative H1 lifespan floor for counting")
    p.add_argument("--emit-loss", action="store_true", help="also write loss.json (adaptive tau/alpha)")
    p.add_argument("--emit-gradient", action="store_true", help="include the gradient in loss.json (implies --emit-loss)")
    common_out(p, short=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("optimize", help="evolve a cloud under surrogate + lambda_ts * L_ts")
    p.add_argument("snapshot", nargs="?")
    p.add_argument("--init-gaussian", nargs=4, metavar=("N", "D", "SIGMA", "SEED"), default=None)
    snapshot_opts(p)
    p.add_argument("--steps", type=_positive_int, default=300)
    p.add_argument("--lr", type=float, default=None, help="learning rate (default: 1e-3 for adam, 4 for sgd)")
    p.add_argument("--optimizer", choices=("adam", "sgd"), default="adam")
    p.add_argument("--backtracking", action="store_true", help="sgd: halve the step until the loss decreases")
    p.add_argument("--adam-betas", type=float, nargs=2, default=(0.9, 0.999), metavar=("BETA1", "BETA2"))
    p.add_argument("--adam-eps", type=float, default=1e-8)
    p.add_argument("--lambda-ts", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=None, help="softmin temperature (default: 0.1 x mean NN distance)")
    p.add_argument("--alpha", type=float, default=None, help="soft-quantile sharpness (default: 10 / mean distance)")
    p.add_argument("--beta-h0", type=float, default=1.0)
    p.add_argument("--beta-h1", type=float, default=1.0)
    p.add_argument("--lambda-repel", type=float, default=1.0)
    p.add_argument("--lambda-attract", type=float, default=1.0)
    p.add_argument("--snapshot-every", type=_positive_int, default=20)
    p.add_argument("--surrogate-target", default=None, help="anchor target snapshot (quadratic surrogate loss)")
    p.add_argument("--surrogate-weight", type=float, default=1.0)
    p.add_argument("--noise-floor", type=_noise_floor, default=0.0)
    p.add_argument("--emit-gradient", action="store_true", help="include the final gradient in loss.json")
    common_out(p, short=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("trajectory", help="recompute the metrics table from a trajectory manifest")
    p.add_argument("manifest")
    p.add_argument("--noise-floor", type=_noise_floor, default=0.0)
    p.add_argument("-o", "--output", default=None, help="metrics CSV path (default: <output-dir>/trajectory_metrics.csv)")
    p.add_argument("--project-pca", action="store_true", help="write a 2-D PCA projection CSV per snapshot")
    common_out(p)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser(
        "correlate",
        help="Spearman / Mann-Whitney report of metrics against an accuracy series",
        description="Rank-test groups come from a median split of the accuracy series: "
        "rows with accuracy <= median form the first group, whose U is reported.",
    )
    p.add_argument("metrics")
    p.add_argument("accuracy", help="CSV with one accuracy value per metrics row (optional header)")
    p.add_argument("--columns", nargs="+", default=None, help="metric columns to report (default: all but step)")
    p.add_argument("-o", "--output", default=None, help="report CSV path (default: <output-dir>/correlation.csv)")
    common_out(p)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("render", help="SVG barcode or persistence diagram from a diagram CSV")
    p.add_argument("diagram")
    p.add_argument("--mode", choices=("barcode", "diagram"), default="barcode")
    p.add_argument("-o", "--output", default=None, help="SVG path (default: <output-dir>/<mode>.svg)")
    common_out(p)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr, format="%(message)s")
    try:
        args.func(args)
    except CommandError as exc:
        print(f"topoprompt {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except (InputError, SnapshotFormatError, OSError) as exc:
        print(f"topoprompt {args.command}: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"topoprompt {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
