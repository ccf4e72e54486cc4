"""Command-line interface.

Subcommands:

* ``simulate``   draw a signal + ensemble, measure it, write the instance JSON
* ``invert``     reconstruct a signal from an instance JSON
* ``certify``    census + Jacobian-rank report for one instance
* ``threshold``  Monte-Carlo sweep estimating the generic threshold
* ``experiment`` full (solver, k, sigma, trial) sweep -> CSV + summary JSON
* ``plot``       render recovery/error SVGs from a results CSV

``invert`` exits 0 when a report is produced, 2 if the instance is not
identifiable, 3 if a measurement is too degenerate to normalize.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NonGenericMeasurement, NotIdentifiable
from .harness import (
    CSV_HEADER,
    ExperimentConfig,
    ResultTable,
    TrialResult,
    aggregate,
    load_config,
    run_experiment,
)
from .identifiability import count_solutions, estimate_generic_threshold, jacobian_rank
from .inversion import invert_ideal_regression, invert_lifted_least_squares
from .model import (
    Distribution,
    Mode,
    ProjectorSpec,
    add_noise,
    forward_measure,
    make_ensemble,
    sample_signal,
)
from .plots import emit_plots
from .serialize import dump_instance, load_instance


def _add_simulate(sub):
    p = sub.add_parser("simulate", help="sample an instance and write it as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, default=1, help="projector rank")
    p.add_argument("--dist", choices=[d.value for d in Distribution if d != Distribution.EXPLICIT],
                   default="haar")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="real")
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--no-signal", action="store_true",
                   help="omit the ground-truth signal from the instance")
    return p


def _cmd_simulate(args):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(args.seed)))
    mode = Mode(args.mode)
    spec = ProjectorSpec(n=args.n, rank=args.r, distribution=Distribution(args.dist),
                         mode=mode)
    z = sample_signal(args.n, mode, rng)
    ensemble = make_ensemble(spec, args.k, rng)
    obs = forward_measure(z, ensemble)
    if args.sigma > 0:
        obs = add_noise(obs, args.sigma, rng)
    dump_instance(args.out, ensemble, obs,
                  signal=None if args.no_signal else z, seed=args.seed)
    print(f"wrote {args.out}")
    return 0


def _add_invert(sub):
    p = sub.add_parser("invert", help="reconstruct the signal of an instance")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--solver", choices=["ideal-regression", "lifted-ls"],
                   default="ideal-regression")
    p.add_argument("--method", choices=["auto", "dense", "nested"], default="auto")
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--out", default=None, help="write the report JSON here")
    return p


def _cmd_invert(args):
    ensemble, obs, signal = load_instance(args.infile)
    if obs is None:
        print("instance carries no observation", file=sys.stderr)
        return 1
    try:
        if args.solver == "ideal-regression":
            rep = invert_ideal_regression(ensemble, obs, true_signal=signal,
                                          t_max=args.t_max, method=args.method)
        else:
            rep = invert_lifted_least_squares(ensemble, obs, true_signal=signal)
    except NotIdentifiable as exc:
        print(f"not identifiable: {exc}", file=sys.stderr)
        return 2
    except NonGenericMeasurement as exc:
        print(f"non-generic measurement: {exc}", file=sys.stderr)
        return 3
    payload = rep.to_dict()
    text = json.dumps(payload, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _add_certify(sub):
    p = sub.add_parser("certify", help="solution census and Jacobian rank")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--starts", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    return p


def _cmd_certify(args):
    ensemble, obs, signal = load_instance(args.infile)
    if obs is None:
        print("instance carries no observation", file=sys.stderr)
        return 1
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(args.seed)))
    census = count_solutions(ensemble, obs, starts=args.starts, rng=rng)
    payload = {
        "census_size": census.size,
        "unique": census.unique,
        "isolated": census.isolated,
        "truncated": census.truncated,
        "starts": census.starts,
        "converged": census.converged,
        "cluster_sizes": list(census.cluster_sizes),
        "max_cluster_spread": census.max_cluster_spread,
        "residuals": list(census.residuals),
        "representatives": [
            {"x": r.x.tolist(), "y": None if r.y is None else r.y.tolist()}
            for r in census.representatives
        ],
    }
    if ensemble.mode is Mode.REAL:
        at = signal if signal is not None else (
            census.representatives[0] if census.size else None)
        if at is not None:
            rank, smin = jacobian_rank(ensemble, at)
            payload["jacobian"] = {
                "rank": rank,
                "sigma_min": smin,
                "at_ground_truth": signal is not None,
            }
    text = json.dumps(payload, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _add_threshold(sub):
    p = sub.add_parser("threshold", help="estimate the generic identifiability threshold")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--dist", choices=["haar", "gaussian"], default="haar")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="real")
    p.add_argument("--oracle", choices=["census", "solver"], default="census")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output directory")
    return p


def _cmd_threshold(args):
    spec = ProjectorSpec(n=args.n, rank=args.r, distribution=Distribution(args.dist),
                         mode=Mode(args.mode))
    report = estimate_generic_threshold(
        spec, range(args.k_min, args.k_max + 1), args.trials, args.seed,
        oracle=args.oracle)
    text = json.dumps(report.to_dict(), indent=1)
    print(text)
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "threshold.json").write_text(text + "\n")
        lines = ["k,frequency"]
        lines += [f"{k},{f!r}" for k, f in zip(report.k_list, report.frequencies)]
        (outdir / "threshold.csv").write_text("\n".join(lines) + "\n")
        print(f"wrote {outdir / 'threshold.json'} and {outdir / 'threshold.csv'}")
    return 0


def _add_experiment(sub):
    p = sub.add_parser("experiment", help="run a Monte-Carlo sweep from a config file")
    p.add_argument("--config", required=True, help="TOML or JSON config")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--solver", action="append", default=None,
                   help="override solver list (repeatable)")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--sigma", type=float, action="append", default=None,
                   help="override noise levels (repeatable)")
    p.add_argument("--timing", action="store_true",
                   help="record wall times in the CSV (breaks byte-reproducibility)")
    p.add_argument("--allow-large", action="store_true",
                   help="permit n >= 9 sweeps (minutes per inversion, large "
                        "coefficient tables)")
    p.add_argument("--workers", type=int, default=None)
    return p


def _cmd_experiment(args):
    try:
        cfg = load_config(args.config)
    except (ValueError, KeyError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return 1
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.solver:
        overrides["solvers"] = tuple(args.solver)
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.sigma:
        overrides["sigmas"] = tuple(args.sigma)
    if args.timing:
        overrides["record_timing"] = True
    if args.allow_large:
        overrides["allow_large"] = True
    if overrides:
        try:
            cfg = ExperimentConfig.from_dict({**cfg.to_dict(), **overrides})
        except (ValueError, KeyError) as exc:
            print(f"bad config: {exc}", file=sys.stderr)
            return 1
    table = run_experiment(cfg, workers=args.workers)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / "results.csv"
    table.to_csv(csv_path)
    summary = aggregate(table)
    summary_path = outdir / "summary.json"
    summary_path.write_text(json.dumps({
        "config": cfg.to_dict(),
        "cells": [c.to_dict() for c in summary],
    }, indent=1) + "\n")
    print(f"wrote {csv_path} and {summary_path}")
    return 0


def _add_plot(sub):
    p = sub.add_parser("plot", help="render SVG figures from a results CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--prefix", default="")
    return p


def _table_from_csv(path):
    import csv as _csv

    rows = []
    with open(path, newline="") as fh:
        reader = _csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER.split(","):
            raise ValueError(f"unexpected CSV header in {path}")
        for rec in reader:
            rows.append(TrialResult(
                solver=rec["solver"], n=int(rec["n"]), k=int(rec["k"]),
                r=int(rec["r"]), sigma=float(rec["sigma"]), trial=int(rec["trial"]),
                rel_error=float(rec["rel_error"]), success=rec["success"] == "1",
                stop_degree=int(rec["stop_degree"]), alpha=float(rec["alpha"]),
                wall_ms=float(rec["wall_ms"]) if rec["wall_ms"] else 0.0,
                seed=rec["seed"],
            ))
    if not rows:
        raise ValueError(f"no rows in {path}")
    solvers = list(dict.fromkeys(r.solver for r in rows))
    cfg = ExperimentConfig(
        n=rows[0].n,
        k_range=tuple(sorted({r.k for r in rows})),
        trials=max(r.trial for r in rows) + 1,
        sigmas=tuple(sorted({r.sigma for r in rows})),
        solvers=tuple(solvers),
        rank=rows[0].r,
    )
    return ResultTable(config=cfg, rows=tuple(rows))


def _cmd_plot(args):
    table = _table_from_csv(args.csv)
    summary = aggregate(table)
    written = emit_plots(summary, args.out, prefix=args.prefix)
    for p in written:
        print(f"wrote {p}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="algphase",
        description="phase retrieval from quadratic measurements: simulation, "
                    "inversion, identifiability certification, experiments",
    )
    parser.add_argument("--version", action="version", version=f"algphase {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_simulate(sub)
    _add_invert(sub)
    _add_certify(sub)
    _add_threshold(sub)
    _add_experiment(sub)
    _add_plot(sub)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "invert": _cmd_invert,
        "certify": _cmd_certify,
        "threshold": _cmd_threshold,
        "experiment": _cmd_experiment,
        "plot": _cmd_plot,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
