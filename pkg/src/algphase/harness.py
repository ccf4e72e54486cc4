"""Reproducible Monte-Carlo experiment driver.

A run is fully described by an :class:`ExperimentConfig`; every trial derives
its own counter-based random stream (Philox) from the master seed and the
(cell, trial) coordinates, so results are bit-identical regardless of how
cells are scheduled. One CSV row is written per trial:

    solver,n,k,r,sigma,trial,rel_error,success,stop_degree,alpha,wall_ms,seed

Timing is recorded on in-memory reports but written to the CSV only when
``record_timing`` is set; the default keeps CSV output byte-reproducible for
a fixed (config, seed).
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

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

__all__ = [
    "ExperimentConfig",
    "TrialResult",
    "ResultTable",
    "CellSummary",
    "run_experiment",
    "aggregate",
    "load_config",
    "WORKERS_ENV",
]

CSV_HEADER = "solver,n,k,r,sigma,trial,rel_error,success,stop_degree,alpha,wall_ms,seed"
WORKERS_ENV = "ALGPHASE_THREADS"

SOLVER_ALIASES = {
    "ideal-regression": "ideal-regression",
    "ideal": "ideal-regression",
    "lifted-ls": "lifted-ls",
    "lifted-least-squares": "lifted-ls",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one sweep."""

    n: int
    k_range: tuple[int, ...]
    trials: int = 100
    sigmas: tuple[float, ...] = (0.0,)
    solvers: tuple[str, ...] = ("ideal-regression",)
    distribution: str = "haar"
    rank: int = 1
    seed: int = 0
    success_threshold: float = 1e-6
    record_timing: bool = False
    t_max: int | None = None
    allow_large: bool = False

    def __post_init__(self):
        object.__setattr__(self, "k_range", tuple(int(k) for k in self.k_range))
        object.__setattr__(self, "sigmas", tuple(float(s) for s in self.sigmas))
        solvers = tuple(SOLVER_ALIASES[s] for s in self.solvers)
        object.__setattr__(self, "solvers", solvers)
        if not self.k_range:
            raise ValueError("k_range must be non-empty")
        if not self.sigmas:
            raise ValueError("sigmas must be non-empty")
        if any(s < 0 for s in self.sigmas):
            raise ValueError("noise levels must be non-negative")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        Distribution(self.distribution)   # validate
        if self.n >= 9 and not self.allow_large:
            raise ValueError(
                f"n = {self.n} sweeps are expensive (a single inversion at "
                f"k = n+1 can take minutes and the degree sweep holds "
                f"O(C(n+t,t)) coefficient tables); set allow_large to opt in")

    @classmethod
    def from_dict(cls, d):
        known = {f: d[f] for f in cls.__dataclass_fields__ if f in d}
        extra = set(d) - set(known)
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**known)

    def to_dict(self):
        return {
            "n": self.n, "k_range": list(self.k_range), "trials": self.trials,
            "sigmas": list(self.sigmas), "solvers": list(self.solvers),
            "distribution": self.distribution, "rank": self.rank,
            "seed": self.seed, "success_threshold": self.success_threshold,
            "record_timing": self.record_timing, "t_max": self.t_max,
            "allow_large": self.allow_large,
        }

    def cells(self):
        """Canonical cell order: solver-major, then k, then sigma."""
        out = []
        for solver in self.solvers:
            for k in self.k_range:
                for sigma in self.sigmas:
                    out.append((solver, k, sigma))
        return out


def load_config(path) -> ExperimentConfig:
    """Read a config from TOML or JSON, keyed on the file extension."""
    text = open(path, "rb").read()
    if str(path).endswith(".json"):
        data = json.loads(text.decode())
    else:
        if sys.version_info >= (3, 11):
            import tomllib
        else:
            import tomli as tomllib
        data = tomllib.loads(text.decode())
    return ExperimentConfig.from_dict(data)


@dataclass(frozen=True)
class TrialResult:
    solver: str
    n: int
    k: int
    r: int
    sigma: float
    trial: int
    rel_error: float
    success: bool
    stop_degree: int
    alpha: float
    wall_ms: float
    seed: str


@dataclass(frozen=True)
class ResultTable:
    config: ExperimentConfig
    rows: tuple[TrialResult, ...]

    def to_csv(self, path=None) -> str:
        """Render the canonical CSV; optionally write it to ``path``.

        Floats are rendered with repr (shortest round-trip form); wall_ms is
        left empty unless the config asked for timing.
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for row in self.rows:
            writer.writerow([
                row.solver, row.n, row.k, row.r,
                repr(row.sigma), row.trial,
                repr(row.rel_error), int(row.success), row.stop_degree,
                repr(row.alpha),
                repr(round(row.wall_ms, 3)) if self.config.record_timing else "",
                row.seed,
            ])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


@dataclass(frozen=True)
class CellSummary:
    solver: str
    k: int
    sigma: float
    trials: int
    success_rate: float
    err_median: float
    err_q1: float
    err_q3: float
    n_failed: int      # trials with no usable estimate (NaN error)

    def to_dict(self):
        return {
            "solver": self.solver, "k": self.k, "sigma": self.sigma,
            "trials": self.trials, "success_rate": self.success_rate,
            "err_median": self.err_median, "err_q1": self.err_q1,
            "err_q3": self.err_q3, "n_failed": self.n_failed,
        }


def _trial_seed_label(master, cell_idx, trial):
    return f"{master}.{cell_idx}.{trial}"


def _run_trial(cfg: ExperimentConfig, solver: str, k: int, sigma: float,
               cell_idx: int, trial: int) -> TrialResult:
    seq = np.random.SeedSequence(cfg.seed, spawn_key=(cell_idx, trial))
    rng = np.random.Generator(np.random.Philox(seq))
    spec = ProjectorSpec(n=cfg.n, rank=cfg.rank,
                         distribution=Distribution(cfg.distribution))
    z = sample_signal(cfg.n, Mode.REAL, rng)
    ensemble = make_ensemble(spec, k, rng)
    obs = forward_measure(z, ensemble)
    if sigma > 0:
        obs = add_noise(obs, sigma, rng)
    try:
        if solver == "ideal-regression":
            rep = invert_ideal_regression(
                ensemble, obs, true_signal=z, t_max=cfg.t_max,
                success_threshold=cfg.success_threshold)
        else:
            rep = invert_lifted_least_squares(
                ensemble, obs, true_signal=z,
                success_threshold=cfg.success_threshold)
        rel_error, success = rep.rel_error, rep.success
        stop_degree, alpha, wall = rep.stop_degree, rep.alpha, rep.wall_ms
    except Exception:
        rel_error, success, stop_degree, alpha, wall = float("nan"), False, 0, float("nan"), 0.0
    return TrialResult(
        solver=solver, n=cfg.n, k=k, r=cfg.rank, sigma=sigma, trial=trial,
        rel_error=rel_error, success=success, stop_degree=stop_degree,
        alpha=alpha, wall_ms=wall,
        seed=_trial_seed_label(cfg.seed, cell_idx, trial),
    )


def _run_cell(args):
    cfg, cell_idx, solver, k, sigma = args
    return [
        _run_trial(cfg, solver, k, sigma, cell_idx, trial)
        for trial in range(cfg.trials)
    ]


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> ResultTable:
    """Run every (solver, k, sigma, trial) cell of the config.

    ``workers`` defaults to the ``ALGPHASE_THREADS`` environment variable
    (serial if unset). Rows come back in canonical cell order whatever the
    pool does, so the CSV is schedule-independent.
    """
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    cells = cfg.cells()
    jobs = [(cfg, ci, solver, k, sigma)
            for ci, (solver, k, sigma) in enumerate(cells)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_cell = list(pool.map(_run_cell, jobs))
    else:
        per_cell = [_run_cell(job) for job in jobs]
    rows = tuple(row for cell_rows in per_cell for row in cell_rows)
    return ResultTable(config=cfg, rows=rows)


def aggregate(table: ResultTable) -> list[CellSummary]:
    """Success rates and error quartiles per (solver, k, sigma) cell.

    Quartiles use linear interpolation (numpy's default percentile rule) over
    the trials that produced an estimate; hard solver failures are counted in
    ``n_failed`` and excluded from the quantiles.
    """
    if not table.rows:
        raise ValueError("empty result table")
    cells = {}
    for row in table.rows:
        cells.setdefault((row.solver, row.k, row.sigma), []).append(row)
    out = []
    for (solver, k, sigma), rows in sorted(
            cells.items(), key=lambda kv: (table.config.solvers.index(kv[0][0]),
                                           kv[0][1], kv[0][2])):
        errs = np.array([r.rel_error for r in rows])
        ok = np.array([r.success for r in rows])
        usable = errs[~np.isnan(errs)]
        if usable.size:
            q1, med, q3 = np.percentile(usable, [25, 50, 75])
        else:
            q1 = med = q3 = float("nan")
        out.append(CellSummary(
            solver=solver, k=k, sigma=sigma, trials=len(rows),
            success_rate=float(ok.mean()),
            err_median=float(med), err_q1=float(q1), err_q3=float(q3),
            n_failed=int(np.isnan(errs).sum()),
        ))
    return out
