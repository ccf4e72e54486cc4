"""Numerical identifiability certification.

Uniqueness of a signal given its quadratic measurements is probed three ways:

* :func:`jacobian_rank` — local certificate: full rank of the measurement
  Jacobian at the signal means the signal stays uniquely recoverable under
  small perturbations (up to the global sign/phase),
* :func:`count_solutions` — global census: batched multistart Gauss-Newton
  on the measurement equations, with converged points clustered modulo the
  mode's symmetry; the census is a lower bound on the true solution count,
* :func:`estimate_generic_threshold` / :func:`compare_projector_classes` —
  Monte-Carlo sweeps over k locating the smallest measurement count at which
  generic instances become uniquely solvable.

Two hand-built fixture ensembles are included. ``diag_ensemble`` measures
squared coordinates; its census is the full set of 2^(n-1) sign classes.
``diag_plus_ones_ensemble`` (n=3) adds the all-ones matrix, which separates
signals into three regimes, classified by :func:`classify_diag_plus_ones`:
stably identifiable, identifiable but unstable, and non-identifiable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatch
from .inversion import invert_ideal_regression
from .model import (
    Distribution,
    MeasurementEnsemble,
    Mode,
    Observation,
    ProjectorSpec,
    Signal,
    ensemble_from_matrices,
    forward_measure,
    make_ensemble,
    sample_signal,
)

__all__ = [
    "SolutionCensus",
    "ThresholdReport",
    "StabilityClass",
    "ClassificationReport",
    "jacobian_rank",
    "count_solutions",
    "estimate_generic_threshold",
    "compare_projector_classes",
    "diag_ensemble",
    "diag_plus_ones_ensemble",
    "classify_diag_plus_ones",
]

CENSUS_CAP_REAL = 5
CENSUS_CAP_SPLIT = 3
RESIDUAL_TOL = 1e-8
CLUSTER_RADIUS = 1e-6


def jacobian_rank(ensemble: MeasurementEnsemble, z, tol_rel: float = 1e-8):
    """Rank and smallest singular value of the measurement Jacobian at z.

    The Jacobian of ``z -> (z^T A_i z)_i`` has rows ``2 (A_i z)^T``. Full
    rank n certifies that the sign ambiguity is the only local one, i.e. the
    signal is perturbation-stably identifiable; a rank drop flags signals
    whose census changes under arbitrarily small perturbations.
    """
    if ensemble.mode is not Mode.REAL:
        raise DimensionMismatch("jacobian_rank handles real-mode ensembles")
    zv = z.x if isinstance(z, Signal) else np.asarray(z, dtype=float)
    if zv.shape != (ensemble.n,):
        raise DimensionMismatch("signal length does not match the ensemble")
    J = 2.0 * np.einsum("kij,j->ki", ensemble.stacked(), zv)
    svals = np.linalg.svd(J, compute_uv=False)
    smallest = float(svals[min(ensemble.k, ensemble.n) - 1])
    if svals[0] <= 0.0:
        return 0, 0.0
    rank = int(np.count_nonzero(svals > tol_rel * svals[0]))
    return rank, smallest


@dataclass(frozen=True)
class SolutionCensus:
    """Distinct solutions modulo sign (real) or phase orbit (split)."""

    representatives: tuple[Signal, ...]
    residuals: tuple[float, ...]
    cluster_sizes: tuple[int, ...]
    starts: int
    converged: int
    radius: float
    max_cluster_spread: float
    truncated: bool = False      # hit the class cap; the true count is larger

    @property
    def size(self):
        return len(self.representatives)

    @property
    def unique(self):
        return self.size == 1 and not self.truncated

    @property
    def isolated(self):
        """Clusters are tight: no sign of a positive-dimensional family."""
        return not self.truncated and self.max_cluster_spread <= 10.0 * self.radius


def _canonical_sign(z):
    pivot = np.argmax(np.abs(z), axis=-1)
    flip = np.take_along_axis(z, pivot[..., None], axis=-1)[..., 0] < 0
    return np.where(flip[..., None], -z, z)


def _split_lift(xy, n):
    """Stacked (R, Phi) lift rows for a batch of split vectors."""
    x, y = xy[..., :n], xy[..., n:]
    R = x[..., :, None] * x[..., None, :] + y[..., :, None] * y[..., None, :]
    Phi = y[..., :, None] * x[..., None, :] - x[..., :, None] * y[..., None, :]
    return np.concatenate([R.reshape(*xy.shape[:-1], -1),
                           Phi.reshape(*xy.shape[:-1], -1)], axis=-1)


def _gauss_newton_batch(F, J, Z, max_iter, tol):
    """Damped batched Gauss-Newton; returns final points and residual norms."""
    lam = 1e-12
    for _ in range(max_iter):
        r = F(Z)                               # (B, k)
        res = np.abs(r).max(axis=1)
        active = res > tol
        if not active.any():
            break
        Ja = J(Z[active])                      # (B, k, d)
        ra = r[active]
        JtJ = np.einsum("bki,bkj->bij", Ja, Ja)
        JtJ += lam * np.trace(JtJ, axis1=1, axis2=2)[:, None, None] * np.eye(JtJ.shape[1])
        Jtr = np.einsum("bki,bk->bi", Ja, ra)
        try:
            step = np.linalg.solve(JtJ, Jtr[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = (np.linalg.pinv(JtJ) @ Jtr[..., None])[..., 0]
        Znew = Z.copy()
        Znew[active] = Z[active] - step
        Z = Znew
    return Z, np.abs(F(Z)).max(axis=1)


def count_solutions(ensemble: MeasurementEnsemble, obs: Observation, *,
                    starts: int | None = None, max_iter: int = 120,
                    radius: float = CLUSTER_RADIUS,
                    residual_tol: float = RESIDUAL_TOL,
                    max_classes: int = 64,
                    rng=None) -> SolutionCensus:
    """Multistart census of ``z^T A_i z = b_i`` (clean observations).

    Runs batched Gauss-Newton from ``starts`` random points (default
    ``200 * 2^n``), keeps the converged ones, and clusters them modulo the
    mode's symmetry: sign flips for real signals, phase rotations for split
    signals (two points are equivalent iff their sign/phase-invariant lifts
    agree within the clustering radius). The census size is a lower bound on
    the true count; raise ``starts`` for more confidence.

    Capped at n <= 5 (real) / n <= 3 (split): beyond that the number of
    starts needed to hit every basin grows too fast to be useful.
    """
    n, k = ensemble.n, ensemble.k
    mode = ensemble.mode
    cap = CENSUS_CAP_REAL if mode is Mode.REAL else CENSUS_CAP_SPLIT
    if n > cap:
        raise ValueError(f"census is capped at n <= {cap} for {mode.value} mode")
    rng = np.random.default_rng(0) if rng is None else rng
    if starts is None:
        starts = 200 * 2 ** n

    b = obs.b
    scale_b = max(float(np.abs(b).max()), 1e-300)

    if mode is Mode.REAL:
        A = ensemble.stacked()
        dim = n
        tr = np.trace(A, axis1=1, axis2=2).mean()

        def F(Z):
            return np.einsum("bi,kij,bj->bk", Z, A, Z) - b

        def J(Z):
            return 2.0 * np.einsum("kij,bj->bki", A, Z)

    else:
        B = np.stack([m.B for m in ensemble.matrices])
        C = np.stack([m.C for m in ensemble.matrices])
        dim = 2 * n
        tr = np.trace(B, axis1=1, axis2=2).mean()

        def F(Z):
            x, y = Z[:, :n], Z[:, n:]
            quad = (np.einsum("bi,kij,bj->bk", x, B, x)
                    + np.einsum("bi,kij,bj->bk", y, B, y)
                    - 2.0 * np.einsum("bi,kij,bj->bk", x, C, y))
            return quad - b

        def J(Z):
            x, y = Z[:, :n], Z[:, n:]
            gx = 2.0 * (np.einsum("kij,bj->bki", B, x) - np.einsum("kij,bj->bki", C, y))
            gy = 2.0 * (np.einsum("kij,bj->bki", B, y) + np.einsum("kij,bj->bki", C, x))
            return np.concatenate([gx, gy], axis=2)

    # start radius from E[z^T A z] = tr(A) |z|^2 / n for random directions
    r0 = np.sqrt(max(np.mean(b), 1e-300) * n / max(tr, 1e-300))
    Z0 = rng.standard_normal((starts, dim))
    Z0 /= np.linalg.norm(Z0, axis=1, keepdims=True)
    Z0 *= r0 * np.exp(0.4 * rng.standard_normal((starts, 1)))

    # iterate far below the acceptance tolerance: at ramified points the
    # residual vanishes quadratically in the distance, so stopping at the
    # acceptance level would leave a cloud much wider than the cluster radius
    Z, res = _gauss_newton_batch(F, J, Z0, max_iter, 1e-15 * scale_b)
    good = res <= residual_tol * scale_b
    Z, res = Z[good], res[good]
    converged = int(good.sum())

    order = np.argsort(res, kind="stable")
    Z, res = Z[order], res[order]

    if mode is Mode.REAL:
        Zc = _canonical_sign(Z)
        lifts = Zc
        ref_scale = max(1.0, float(np.linalg.norm(Zc[0])) if len(Zc) else 1.0)
    else:
        lifts = _split_lift(Z, n)
        Zc = Z
        ref_scale = max(1.0, float(np.linalg.norm(lifts[0])) if len(lifts) else 1.0)

    reps, rep_lifts, rep_res, sizes, spreads = [], [], [], [], []
    truncated = False
    for i in range(len(Zc)):
        if rep_lifts:
            L = np.asarray(rep_lifts)
            d = np.linalg.norm(lifts[i][None, :] - L, axis=1)
            if mode is Mode.REAL:
                d = np.minimum(d, np.linalg.norm(lifts[i][None, :] + L, axis=1))
            ci = int(np.argmin(d))
            if d[ci] <= radius * ref_scale:
                sizes[ci] += 1
                spreads[ci] = max(spreads[ci], float(d[ci]))
                continue
        if len(reps) >= max_classes:
            truncated = True
            break
        reps.append(Zc[i])
        rep_lifts.append(lifts[i])
        rep_res.append(float(res[i]))
        sizes.append(1)
        spreads.append(0.0)

    if mode is Mode.REAL:
        signals = tuple(Signal.real(r) for r in reps)
    else:
        signals = tuple(_canonical_phase(r, n) for r in reps)
    return SolutionCensus(
        representatives=signals,
        residuals=tuple(rep_res),
        cluster_sizes=tuple(sizes),
        starts=starts,
        converged=converged,
        radius=radius,
        max_cluster_spread=float(max(spreads, default=0.0)),
        truncated=truncated,
    )


def _canonical_phase(xy, n):
    """Rotate a split vector so its largest entry is real positive."""
    zc = xy[:n] + 1j * xy[n:]
    pivot = int(np.argmax(np.abs(zc)))
    phase = zc[pivot] / abs(zc[pivot]) if abs(zc[pivot]) > 0 else 1.0
    zc = zc / phase
    return Signal.complex_split(zc.real, zc.imag)


@dataclass(frozen=True)
class ThresholdReport:
    """Per-k uniqueness frequencies and the estimated generic threshold."""

    n: int
    rank: int
    mode: Mode
    distribution: Distribution
    k_list: tuple[int, ...]
    frequencies: tuple[float, ...]
    trials: int
    seed: int
    oracle: str
    freq_threshold: float

    @property
    def lambda_hat(self):
        for k, f in zip(self.k_list, self.frequencies):
            if f >= self.freq_threshold:
                return k
        return None

    def to_dict(self):
        return {
            "n": self.n,
            "rank": self.rank,
            "mode": self.mode.value,
            "distribution": self.distribution.value,
            "k": list(self.k_list),
            "frequency": list(self.frequencies),
            "trials": self.trials,
            "seed": self.seed,
            "oracle": self.oracle,
            "freq_threshold": self.freq_threshold,
            "lambda_hat": self.lambda_hat,
        }


def _seed_from(rng_or_seed):
    if rng_or_seed is None:
        return 0
    if isinstance(rng_or_seed, (int, np.integer)):
        return int(rng_or_seed)
    # derive a stable seed from a live generator
    return int(rng_or_seed.integers(0, 2**63 - 1))


def _trial_rng(seed, *key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def _instance_unique(spec, k, rng, oracle, success_threshold):
    z = sample_signal(spec.n, spec.mode, rng)
    ensemble = make_ensemble(spec, k, rng)
    obs = forward_measure(z, ensemble)
    if oracle == "census":
        census = count_solutions(ensemble, obs, rng=rng)
        return census.unique and census.isolated
    try:
        rep = invert_ideal_regression(
            ensemble, obs, true_signal=z, success_threshold=success_threshold)
    except Exception:
        return False
    return rep.success


def estimate_generic_threshold(spec: ProjectorSpec, k_range, trials: int,
                               rng=None, *, oracle: str = "census",
                               freq_threshold: float = 0.95,
                               success_threshold: float = 1e-6) -> ThresholdReport:
    """Smallest k at which generic instances become uniquely solvable.

    For each k a fresh signal/ensemble pair is drawn per trial and uniqueness
    is decided by the chosen oracle: ``"census"`` (multistart count == 1,
    subject to the census dimension caps) or ``"solver"`` (the threshold
    inversion succeeds). The estimate is the smallest k whose frequency
    reaches ``freq_threshold``. Trials use independent counter-based streams
    keyed by (k, trial), so results do not depend on scheduling.
    """
    k_list = tuple(int(k) for k in k_range)
    if not k_list:
        raise ValueError("empty k range")
    if trials < 1:
        raise ValueError("need at least one trial")
    if oracle not in ("census", "solver"):
        raise ValueError(f"unknown oracle {oracle!r}")
    seed = _seed_from(rng)
    freqs = []
    for ki, k in enumerate(k_list):
        hits = 0
        for trial in range(trials):
            trial_rng = _trial_rng(seed, ki, trial)
            hits += _instance_unique(spec, k, trial_rng, oracle, success_threshold)
        freqs.append(hits / trials)
    return ThresholdReport(
        n=spec.n, rank=spec.rank, mode=spec.mode, distribution=spec.distribution,
        k_list=k_list, frequencies=tuple(freqs), trials=trials, seed=seed,
        oracle=oracle, freq_threshold=freq_threshold,
    )


def compare_projector_classes(n: int, k_range, ranks, trials: int, rng=None, *,
                              oracle: str = "solver",
                              success_threshold: float = 1e-6):
    """Success-frequency table over projector classes and ranks.

    Rows cover both distributions (generic Gaussian, Haar orthogonal) for
    every requested rank and every k. Used to check empirically that the
    identifiability threshold depends on neither the distribution nor the
    projector rank.
    """
    seed = _seed_from(rng)
    rows = []
    classes = [
        (dist, r)
        for dist in (Distribution.GENERIC_GAUSSIAN, Distribution.HAAR_ORTHOGONAL)
        for r in ranks
    ]
    for ci, (dist, r) in enumerate(classes):
        spec = ProjectorSpec(n=n, rank=r, distribution=dist)
        for ki, k in enumerate(k_range):
            hits = 0
            for trial in range(trials):
                trial_rng = _trial_rng(seed, ci, ki, trial)
                hits += _instance_unique(spec, int(k), trial_rng, oracle, success_threshold)
            rows.append({
                "distribution": dist.value,
                "rank": r,
                "k": int(k),
                "frequency": hits / trials,
                "trials": trials,
            })
    return rows


# ---------------------------------------------------------------------------
# fixture ensembles
# ---------------------------------------------------------------------------


def diag_ensemble(n: int) -> MeasurementEnsemble:
    """Coordinate measurements ``b_i = z_i^2`` (rank-one diagonal matrices).

    Every sign pattern of the coordinate roots solves the system, so the
    census of a generic signal has exactly 2^(n-1) classes.
    """
    e = np.eye(n)
    return ensemble_from_matrices([np.outer(e[i], e[i]) for i in range(n)])


def diag_plus_ones_ensemble() -> MeasurementEnsemble:
    """The three coordinate measurements plus the all-ones matrix (n=3).

    The fourth measurement ``(z_1+z_2+z_3)^2`` breaks most sign ambiguities:
    it identifies every signal except those with an opposite coordinate pair.
    """
    e = np.eye(3)
    mats = [np.outer(e[i], e[i]) for i in range(3)] + [np.ones((3, 3))]
    return ensemble_from_matrices(mats)


class StabilityClass(Enum):
    PERTURBATION_STABLE = "perturbation-stably identifiable"
    IDENTIFIABLE_UNSTABLE = "identifiable but not perturbation-stably"
    NOT_IDENTIFIABLE = "not identifiable"


@dataclass(frozen=True)
class ClassificationReport:
    label: StabilityClass
    opposite_pair: bool          # some z_i == -z_j (i != j)
    zero_coordinate: bool        # some z_l == 0
    census_size: int
    jacobian_rank: int
    jacobian_sigma_min: float


def classify_diag_plus_ones(z, *, tol: float = 1e-9,
                            rng=None) -> ClassificationReport:
    """Three-way classification of a signal under the diag-plus-ones ensemble.

    For this ensemble the identifiable signals are characterized exactly:
    signals without an opposite coordinate pair (z_i = -z_j) are
    perturbation-stably identifiable; among the others, only those lying on
    a coordinate hyperplane (some z_l = 0) remain identifiable, and those
    are unstable. The numeric census and Jacobian rank are computed alongside
    the exact predicates and returned for corroboration.
    """
    zv = z.x if isinstance(z, Signal) else np.asarray(z, dtype=float)
    if zv.shape != (3,):
        raise DimensionMismatch("this classification is defined for n = 3")
    scale = max(1.0, float(np.abs(zv).max()))
    pairs = [(0, 1), (0, 2), (1, 2)]
    opposite = any(abs(zv[i] + zv[j]) <= tol * scale for i, j in pairs)
    on_axis = bool(np.any(np.abs(zv) <= tol * scale))

    if not opposite:
        label = StabilityClass.PERTURBATION_STABLE
    elif on_axis:
        label = StabilityClass.IDENTIFIABLE_UNSTABLE
    else:
        label = StabilityClass.NOT_IDENTIFIABLE

    ensemble = diag_plus_ones_ensemble()
    obs = forward_measure(Signal.real(zv), ensemble)
    census = count_solutions(ensemble, obs, rng=rng)
    rank, smin = jacobian_rank(ensemble, zv)
    return ClassificationReport(
        label=label,
        opposite_pair=opposite,
        zero_coordinate=on_axis,
        census_size=census.size,
        jacobian_rank=rank,
        jacobian_sigma_min=smin,
    )
