"""Signal reconstruction from quadratic magnitude measurements.

The main entry point is :func:`invert_ideal_regression`, which works at the
information-theoretic threshold k >= n+1:

1. normalize the measured quadratic forms so their constant terms cancel
   (:func:`normalize_quadrics`), leaving homogeneous quadrics that vanish at
   the unknown signal;
2. raise the quadrics degree by degree until the span of their multiples
   fills all but one dimension of the degree-t coefficient space;
3. the orthogonal complement is then spanned by the moment vector
   ``(z^a)_a``, whose catalecticant factors as a rank-one matrix with left
   factor z;
4. recover the lost scale from the measurements (:func:`recover_scale`).

For k >= n(n+1)/2 the lifted linear system is solvable directly and
:func:`invert_lifted_least_squares` provides the classical baseline.
Two hand-constructed measurement schemes with closed-form inverses below the
threshold (``anchored_*``) round out the module; they pivot every equation on
the first signal coordinate.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    IllConditioned,
    NonGenericMeasurement,
    NonGenericSignal,
    NotIdentifiable,
)
from .model import (
    MeasurementEnsemble,
    Mode,
    Observation,
    Signal,
    ensemble_from_matrices,
    ensemble_from_split_pairs,
    signal_rel_error,
)
from .polyspace import (
    FormCoeffs,
    catalecticant_extract,
    moment_vector,
    monomial_basis,
    prolong,
    quadric_from_matrix,
    raise_indices,
)

__all__ = [
    "QuadricSet",
    "RecoveryReport",
    "ScaleResult",
    "normalize_quadrics",
    "invert_ideal_regression",
    "recover_scale",
    "invert_lifted_least_squares",
    "anchored_ensemble",
    "solve_anchored_real",
    "anchored_complex_ensemble",
    "split_anchored_observation",
    "solve_anchored_complex",
]

DEFAULT_SUCCESS_THRESHOLD = 1e-6
# tighter than the generic coefficient-space default: the sweep's rank
# decisions must not mistake an ill-conditioned but nonzero direction for a
# second null vector
DEFAULT_TOL_REL = 1e-11
DEFAULT_GAP_MIN = 10.0
DEFAULT_FALLBACK_GAP = 2.0
CONSISTENCY_TOL = 1e-8
_GAP_WINDOW = 64


@dataclass(frozen=True)
class QuadricSet:
    """Mean-centered quadrics ``q_i = p_i/b_i - mean_j(p_j/b_j)``.

    ``coeffs_full`` holds all k rows (they sum to zero exactly up to
    rounding); ``dropped`` is the index removed to break that dependency, so
    ``coeffs`` has k-1 rows. All rows vanish at the true signal on clean data.
    """

    n: int
    coeffs_full: np.ndarray
    dropped: int

    @property
    def coeffs(self):
        return np.delete(self.coeffs_full, self.dropped, axis=0)

    @property
    def kept(self):
        k = self.coeffs_full.shape[0]
        return tuple(i for i in range(k) if i != self.dropped)

    def forms(self):
        return [FormCoeffs(n=self.n, t=2, coeffs=row) for row in self.coeffs]

    def evaluate_at(self, z):
        return self.coeffs @ moment_vector(np.asarray(z, dtype=float), 2)


@dataclass(frozen=True)
class RecoveryReport:
    """Outcome of one reconstruction attempt."""

    z_hat: Signal
    solver: str
    stop_degree: int
    gap: float
    alpha: float
    residual_max: float
    rel_error: float | None
    success: bool
    wall_ms: float
    flags: tuple[str, ...] = ()
    degree_codims: tuple[tuple[int, int], ...] = ()

    def to_dict(self):
        return {
            "solver": self.solver,
            "z_hat": self.z_hat.x.tolist(),
            "z_hat_imag": None if self.z_hat.y is None else self.z_hat.y.tolist(),
            "stop_degree": self.stop_degree,
            "gap": float(min(self.gap, 1e300)),
            "alpha": self.alpha,
            "residual_max": self.residual_max,
            "rel_error": self.rel_error,
            "success": bool(self.success),
            "wall_ms": self.wall_ms,
            "flags": list(self.flags),
            "degree_codims": [list(p) for p in self.degree_codims],
        }


def normalize_quadrics(ensemble: MeasurementEnsemble, obs: Observation,
                       tol_b: float = 1e-10) -> QuadricSet:
    """Turn measurements into homogeneous quadrics vanishing at the signal.

    Dividing ``p_i = X^T A_i X - b_i`` by ``b_i`` and subtracting the mean of
    all such rows cancels the constant terms exactly, so each row is the
    coefficient vector of ``X^T (A_i/b_i - mean_j A_j/b_j) X``. One row (the
    one of smallest norm) is dropped since the full set sums to zero.
    """
    if ensemble.mode is not Mode.REAL:
        raise DimensionMismatch("quadric normalization is defined for real-mode data")
    if ensemble.k != obs.k:
        raise DimensionMismatch("ensemble and observation sizes differ")
    if ensemble.k < 2:
        raise NonGenericMeasurement("need at least two measurements to center")
    b = obs.b
    bmax = float(np.abs(b).max())
    if bmax == 0.0:
        raise NonGenericMeasurement("all measurements are zero")
    small = np.nonzero(np.abs(b) <= tol_b * bmax)[0]
    if small.size:
        raise NonGenericMeasurement(
            f"measurements {small.tolist()} are too close to zero to normalize"
        )
    rows = np.vstack([
        quadric_from_matrix(m.A).coeffs / b[i]
        for i, m in enumerate(ensemble.matrices)
    ])
    rows = rows - rows.mean(axis=0, keepdims=True)
    dropped = int(np.argmin(np.linalg.norm(rows, axis=1)))
    return QuadricSet(n=ensemble.n, coeffs_full=rows, dropped=dropped)


# ---------------------------------------------------------------------------
# degree-sweep machinery
# ---------------------------------------------------------------------------


@dataclass
class _Decision:
    codim_exact: int
    stop_one: bool
    rule: str
    gap_last: float
    dim_guess: int
    evidence: float = 0.0   # best-effort codim-1 evidence for the fallback


def _decide(svals, n_cols, tol_rel, gap_min):
    """Null-dimension decision for one coefficient stack.

    Exact rule: singular values at or below ``tol_rel * max`` (plus columns
    with no singular value at all) count as zero. If nothing qualifies the
    data is treated as noisy and the largest relative gap in the tail of the
    spectrum decides; a stop requires the gap to sit between the two smallest
    values and to exceed ``gap_min``. Only that noisy regime (numerically
    full rank, no structural zeros) yields fallback evidence; a wide gap
    inside a larger zero block says nothing about a one-dimensional
    complement.
    """
    svals = np.asarray(svals, dtype=float)
    structural = n_cols - svals.size
    if svals.size == 0 or svals[0] <= 0.0:
        return _Decision(n_cols, n_cols == 1, "exact", np.inf, n_cols)
    exact = int(np.count_nonzero(svals <= tol_rel * svals[0])) + structural
    if structural > 0:
        gap_last = np.inf
    elif svals[-1] > 0 and svals.size >= 2:
        gap_last = float(svals[-2] / svals[-1])
    else:
        gap_last = np.inf
    if exact >= 1:
        return _Decision(exact, exact == 1, "exact", gap_last, exact)
    lo = max(0, svals.size - _GAP_WINDOW)
    ratios = svals[lo:-1] / svals[lo + 1 :]
    if ratios.size == 0:
        return _Decision(0, False, "", gap_last, 1)
    j = int(np.argmax(ratios))
    dim_guess = ratios.size - j
    stop = dim_guess == 1 and gap_last >= gap_min
    evidence = gap_last if dim_guess == 1 else 0.0
    return _Decision(0, stop, "gap" if stop else "", gap_last, dim_guess, evidence)


class _DenseStep:
    """One degree of the explicit prolongation sweep."""

    def __init__(self, t, prolongation):
        self.t = t
        self.svals = prolongation.singular_values
        self.n_cols = prolongation.matrix.shape[1]
        self._prol = prolongation

    def extract(self):
        # the stored codim came from the exact rule; for a gap-rule stop it
        # may read 0, so bypass the precondition and take the smallest
        # right-singular vector directly
        _, svals, vt = np.linalg.svd(self._prol.matrix, full_matrices=True)
        padded = np.zeros(self.n_cols)
        padded[: svals.size] = svals
        gap = float(padded[-2] / padded[-1]) if padded[-1] > 0 else np.inf
        v = vt[-1]
        return v / np.linalg.norm(v), gap


def _dense_sweep(coeffs, t_range, tol_rel):
    for t in t_range:
        yield _DenseStep(t, prolong(coeffs, t, tol_rel=tol_rel, degree_cap=max(t_range) + 1))


class _NestedStep:
    """One degree of the complement-recursion sweep.

    Holds whatever is needed to reconstruct the degree-t moment vector if
    the sweep stops here: the stacked system ``G`` and the complement basis
    one degree down.
    """

    def __init__(self, n, t, G, n_cols, w_cur_basis):
        self.t = t
        self.n = n
        self.G = G
        self.svals = np.linalg.svd(G, compute_uv=False)
        self.n_cols = n_cols
        self.w_cur_basis = w_cur_basis     # None at t == 2

    def _null_vectors(self, count):
        _, svals, vt = np.linalg.svd(self.G, full_matrices=True)
        padded = np.zeros(self.n_cols)
        padded[: svals.size] = svals
        gap = float(padded[-2] / padded[-1]) if padded[-1] > 0 else np.inf
        return vt[self.n_cols - count :], gap

    def _assemble(self, coord_rows):
        """Moment vectors at degree t from shift coordinates in W_{t-1}.

        Each unknown block a_j encodes the down-shift by variable j; entry
        ``m_{beta+e_j}`` is recovered as ``(W a_j)_beta`` and averaged over
        all variables that can produce it.
        """
        n, t = self.n, self.t
        R = raise_indices(n, t)
        n_high = monomial_basis(n, t).size
        counts = np.zeros(n_high)
        for j in range(n):
            np.add.at(counts, R[:, j], 1.0)
        w = self.w_cur_basis.shape[1]
        out = np.zeros((coord_rows.shape[0], n_high))
        for row_i, a in enumerate(coord_rows):
            acc = np.zeros(n_high)
            blocks = a.reshape(n, w)
            for j in range(n):
                u_j = self.w_cur_basis @ blocks[j]
                np.add.at(acc, R[:, j], u_j)
            out[row_i] = acc / counts
        return out

    def extract(self):
        vecs, gap = self._null_vectors(1)
        if self.t == 2:
            m = vecs[0]
        else:
            m = self._assemble(vecs)[0]
        return m / np.linalg.norm(m), gap

    def basis_for_next(self, count):
        vecs, _ = self._null_vectors(count)
        if self.t == 2:
            basis = vecs.T
        else:
            basis = self._assemble(vecs).T
        q, _ = np.linalg.qr(basis)
        return q


def _nested_sweep(coeffs, n, t_range):
    """Degree sweep tracking the small orthogonal complement instead of the
    full prolongation stack.

    At degree t, a coefficient vector m lies in the complement of the ideal
    iff every down-shift ``(m_{beta+e_j})_beta`` lies in the degree-(t-1)
    complement; stacking the pairwise shift-compatibility conditions over a
    basis of the previous complement gives a small dense system whose null
    space is isomorphic to the degree-t complement. Produces the same
    codimension sequence and stop vector as the explicit prolongation.
    """
    W_prev = None       # complement basis at degree t-1
    W_lower = None      # complement basis at degree t-2 (None = identity, t=3 only)
    for t in t_range:
        if t == 2:
            G = coeffs
            step = _NestedStep(n, 2, G, monomial_basis(n, 2).size, None)
        else:
            R_low = raise_indices(n, t - 1)       # degree t-2 -> t-1 index table
            w1 = W_prev.shape[1]
            shifted = [W_prev[R_low[:, i], :] for i in range(n)]
            if W_lower is None:
                T = shifted
            else:
                T = [W_lower.T @ s for s in shifted]
            w2 = T[0].shape[0]
            pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
            G = np.zeros((len(pairs) * w2, n * w1))
            for p, (i, j) in enumerate(pairs):
                G[p * w2 : (p + 1) * w2, j * w1 : (j + 1) * w1] = T[i]
                G[p * w2 : (p + 1) * w2, i * w1 : (i + 1) * w1] -= T[j]
            step = _NestedStep(n, t, G, n * w1, W_prev)
        decision = yield step
        if decision is None or decision.stop_one:
            return
        w_next = max(1, decision.codim_exact or decision.dim_guess)
        W_lower = None if t == 2 else W_prev
        W_prev = step.basis_for_next(w_next)


def _run_sweep(engine, coeffs, n, t_range, tol_rel, gap_min):
    """Drive a sweep generator; returns (steps, decisions)."""
    steps, decisions = [], []
    if engine == "dense":
        for step in _dense_sweep(coeffs, t_range, tol_rel):
            d = _decide(step.svals, step.n_cols, tol_rel, gap_min)
            steps.append(step)
            decisions.append(d)
            if d.stop_one:
                break
    else:
        gen = _nested_sweep(coeffs, n, t_range)
        step = next(gen)
        while True:
            d = _decide(step.svals, step.n_cols, tol_rel, gap_min)
            steps.append(step)
            decisions.append(d)
            if d.stop_one:
                break
            try:
                step = gen.send(d)
            except StopIteration:
                break
    return steps, decisions


def invert_ideal_regression(ensemble: MeasurementEnsemble, obs: Observation, *,
                            true_signal: Signal | None = None,
                            t_max: int | None = None,
                            tol_rel: float = DEFAULT_TOL_REL,
                            gap_min: float = DEFAULT_GAP_MIN,
                            fallback_gap: float = DEFAULT_FALLBACK_GAP,
                            success_threshold: float = DEFAULT_SUCCESS_THRESHOLD,
                            method: str = "auto",
                            polish: bool = True) -> RecoveryReport:
    """Reconstruct a real signal at the identifiability threshold.

    Sweeps degrees t = 2, 3, ... until the quadrics' degree-t multiples leave
    a one-dimensional complement, reads the signal direction off that
    complement, and re-fits the scale. Deterministic for fixed inputs.

    ``method`` selects the sweep engine: ``"dense"`` builds the explicit
    prolongation stack, ``"nested"`` tracks the (small) complement
    recursively; both compute the same codimension sequence and stop vector.
    ``"auto"`` picks dense for n <= 6.

    ``polish`` runs a short damped Gauss-Newton pass on the measurement
    residual from the algebraic estimate; it only ever replaces the estimate
    by one with strictly smaller residual. This compensates the conditioning
    loss of nearly tangent measurements (tiny b_i) without changing what the
    algebraic pipeline computes.

    Raises :exc:`NotIdentifiable` when no degree up to ``t_max`` isolates a
    one-dimensional complement (typical for k <= n), and
    :exc:`NonGenericMeasurement` via the quadric normalization.
    """
    t_start = time.perf_counter()
    if ensemble.mode is not Mode.REAL:
        raise DimensionMismatch("ideal-regression inversion handles real signals")
    n = ensemble.n
    if t_max is None:
        t_max = max(2, n)
    if method == "auto":
        method = "dense" if n <= 6 else "nested"
    if method not in ("dense", "nested"):
        raise ValueError(f"unknown method {method!r}")

    if n == 1:
        # every quadric is a multiple of X^2; only the scale is unknown
        return _invert_scalar(ensemble, obs, true_signal, success_threshold, t_start)

    qs = normalize_quadrics(ensemble, obs)
    # Re-basis the quadric span orthonormally before sweeping: a nearly
    # tangent measurement (tiny b_i) otherwise dominates every centered row
    # and wrecks the singular-value decisions. The span, hence the ideal and
    # its codimensions, is unchanged.
    _, qsv, qvt = np.linalg.svd(qs.coeffs, full_matrices=False)
    keep = max(1, int(np.count_nonzero(qsv > 1e-13 * qsv[0])))
    coeffs = qvt[:keep]
    t_range = range(2, t_max + 1)
    steps, decisions = _run_sweep(method, coeffs, n, t_range, tol_rel, gap_min)

    flags = []
    stop_idx = None
    if decisions and decisions[-1].stop_one:
        stop_idx = len(decisions) - 1
    else:
        candidates = [
            (d.evidence, steps[i].t, i) for i, d in enumerate(decisions)
            if d.evidence >= fallback_gap
        ]
        if candidates:
            stop_idx = max(candidates)[2]
            flags.append("forced-stop")
        elif decisions and decisions[-1].codim_exact == 0:
            # numerically full rank everywhere: rounding or noise has lifted
            # the null value; take the smallest direction at the last degree
            # and let the residual decide
            stop_idx = len(decisions) - 1
            flags.append("forced-stop")
    codim_trace = tuple((s.t, d.codim_exact) for s, d in zip(steps, decisions))
    if stop_idx is None:
        raise NotIdentifiable(
            f"codimension never reached 1 up to degree {t_max}; "
            f"trace {list(codim_trace)}"
        )

    step = steps[stop_idx]
    m, gap = step.extract()
    try:
        z_dir = catalecticant_extract(m, n, step.t)
    except ValueError as exc:
        raise IllConditioned(str(exc)) from exc

    scale = recover_scale(z_dir, ensemble, obs)
    if scale.fallback:
        flags.append("scale-fallback")
    z_hat = scale.z_hat
    if polish:
        z_hat = _polish(z_hat, ensemble, obs)

    residual = _consistency_residual(z_hat, ensemble, obs)
    rel = signal_rel_error(z_hat, true_signal) if true_signal is not None else None
    if rel is not None:
        ok = rel <= success_threshold
    else:
        ok = residual <= CONSISTENCY_TOL * max(np.abs(obs.b).max(), 1e-300)
    wall = (time.perf_counter() - t_start) * 1e3
    return RecoveryReport(
        z_hat=z_hat, solver="ideal-regression", stop_degree=step.t, gap=gap,
        alpha=scale.alpha, residual_max=residual, rel_error=rel, success=bool(ok),
        wall_ms=wall, flags=tuple(flags), degree_codims=codim_trace,
    )


def _polish(z_hat: Signal, ensemble, obs, iters: int = 6) -> Signal:
    """Damped Gauss-Newton refinement of the measurement residual.

    Starts at the algebraic estimate and keeps a step only while the maximum
    residual strictly improves, so a wrong basin or a noisy instance leaves
    the input unchanged in the worst case. Deterministic.
    """
    A = ensemble.stacked()
    b = obs.b
    z = z_hat.x.copy()

    def residual(v):
        return np.einsum("i,kij,j->k", v, A, v) - b

    best, best_res = z, float(np.abs(residual(z)).max())
    for _ in range(iters):
        r = residual(z)
        Jz = 2.0 * np.einsum("kij,j->ki", A, z)
        step, *_ = np.linalg.lstsq(Jz, -r, rcond=None)
        z = z + step
        res = float(np.abs(residual(z)).max())
        if not np.isfinite(res) or res >= best_res:
            break
        best, best_res = z.copy(), res
    pivot = int(np.argmax(np.abs(best)))
    if best[pivot] < 0:
        best = -best
    return Signal.real(best)


def _invert_scalar(ensemble, obs, true_signal, success_threshold, t_start):
    scale = recover_scale(np.ones(1), ensemble, obs)
    z_hat = scale.z_hat
    residual = _consistency_residual(z_hat, ensemble, obs)
    rel = signal_rel_error(z_hat, true_signal) if true_signal is not None else None
    ok = (rel <= success_threshold) if rel is not None else (
        residual <= CONSISTENCY_TOL * max(np.abs(obs.b).max(), 1e-300))
    return RecoveryReport(
        z_hat=z_hat, solver="ideal-regression", stop_degree=2, gap=np.inf,
        alpha=scale.alpha, residual_max=residual, rel_error=rel, success=bool(ok),
        wall_ms=(time.perf_counter() - t_start) * 1e3,
        flags=("scale-fallback",) if scale.fallback else (),
        degree_codims=((2, 1),),
    )


@dataclass(frozen=True)
class ScaleResult:
    alpha: float
    z_hat: Signal
    fallback: bool


def recover_scale(z_dir, ensemble: MeasurementEnsemble, obs: Observation) -> ScaleResult:
    """Magnitude of the signal along a recovered unit direction.

    With ``u_i = d^T A_i d`` the scale satisfies ``alpha^2 u_i = b_i`` on
    clean data, so ``alpha`` is computed as the half-log geometric mean of
    ``b_i / u_i``. If any value is non-positive (indefinite measurement
    matrices, noise), a least-squares fit ``alpha^2 = sum(b u) / sum(u^2)``
    takes over and is reported as the fallback.
    """
    d = z_dir.x if isinstance(z_dir, Signal) else np.asarray(z_dir, dtype=float)
    A = ensemble.stacked()
    u = np.einsum("i,kij,j->k", d, A, d)
    b = obs.b
    if np.all(u > 0) and np.all(b > 0):
        alpha = float(np.exp(-0.5 * np.mean(np.log(u) - np.log(b))))
        fallback = False
    else:
        denom = float(u @ u)
        alpha = float(np.sqrt(max(b @ u, 0.0) / denom)) if denom > 0 else 0.0
        fallback = True
    return ScaleResult(alpha=alpha, z_hat=Signal.real(alpha * d), fallback=fallback)


def _consistency_residual(z_hat: Signal, ensemble: MeasurementEnsemble,
                          obs: Observation) -> float:
    A = ensemble.stacked()
    pred = np.einsum("i,kij,j->k", z_hat.x, A, z_hat.x)
    return float(np.abs(pred - obs.b).max())


def invert_lifted_least_squares(ensemble: MeasurementEnsemble, obs: Observation, *,
                                true_signal: Signal | None = None,
                                success_threshold: float = DEFAULT_SUCCESS_THRESHOLD,
                                ) -> RecoveryReport:
    """Linear inversion of the lifted system ``Tr(A_i Z) = b_i``.

    Solves for the symmetric matrix Z in the n(n+1)/2-dimensional coefficient
    space by least squares, takes the top eigenpair of the symmetrized
    solution as the signal direction, and re-fits the scale through
    :func:`recover_scale`. For k below n(n+1)/2 the minimum-norm solution is
    returned and the report carries the ``underdetermined`` flag.
    """
    t_start = time.perf_counter()
    if ensemble.mode is not Mode.REAL:
        raise DimensionMismatch("lifted least squares handles real signals")
    if ensemble.k != obs.k:
        raise DimensionMismatch("ensemble and observation sizes differ")
    n, k = ensemble.n, ensemble.k
    A = ensemble.stacked()
    iu = np.triu_indices(n, 1)
    design = np.hstack([
        A[:, np.arange(n), np.arange(n)],        # diagonal entries
        2.0 * A[:, iu[0], iu[1]],                # doubled off-diagonal entries
    ])
    u, *_ = np.linalg.lstsq(design, obs.b, rcond=None)
    Z = np.zeros((n, n))
    Z[np.arange(n), np.arange(n)] = u[:n]
    Z[iu] = u[n:]
    Z = Z + np.triu(Z, 1).T
    evals, evecs = np.linalg.eigh(Z)
    lam = float(evals[-1])
    direction = evecs[:, -1]
    pivot = int(np.argmax(np.abs(direction)))
    if direction[pivot] < 0:
        direction = -direction
    others = np.abs(evals[:-1]).max() if n > 1 else 0.0
    gap = float(lam / others) if others > 0 else np.inf

    flags = []
    if k < n * (n + 1) // 2:
        flags.append("underdetermined")
    scale = recover_scale(direction, ensemble, obs)
    if scale.fallback:
        flags.append("scale-fallback")
    z_hat = scale.z_hat

    residual = _consistency_residual(z_hat, ensemble, obs)
    rel = signal_rel_error(z_hat, true_signal) if true_signal is not None else None
    if rel is not None:
        ok = rel <= success_threshold
    else:
        ok = residual <= CONSISTENCY_TOL * max(np.abs(obs.b).max(), 1e-300)
    wall = (time.perf_counter() - t_start) * 1e3
    return RecoveryReport(
        z_hat=z_hat, solver="lifted-ls", stop_degree=2, gap=gap,
        alpha=scale.alpha, residual_max=residual, rel_error=rel, success=bool(ok),
        wall_ms=wall, flags=tuple(flags),
    )


# ---------------------------------------------------------------------------
# closed-form below-threshold schemes
# ---------------------------------------------------------------------------


def anchored_ensemble(n: int) -> MeasurementEnsemble:
    """n real measurements pivoting on the first coordinate.

    ``A_1 = e1 e1^T`` and ``A_j = e1 e1^T + ej e1^T + e1 ej^T`` for j >= 2,
    so ``b_1 = z_1^2`` and ``b_j = z_1^2 + 2 z_1 z_j``. Every signal with
    z_1 != 0 is determined up to global sign by these n measurements.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    mats = []
    e = np.eye(n)
    mats.append(np.outer(e[0], e[0]))
    for j in range(1, n):
        mats.append(np.outer(e[0], e[0]) + np.outer(e[j], e[0]) + np.outer(e[0], e[j]))
    return ensemble_from_matrices(mats)


def solve_anchored_real(b, tol: float = 1e-12) -> Signal:
    """Closed-form inverse of the anchored real scheme.

    ``z_1 = sqrt(b_1)`` (global sign fixed positive) and
    ``z_j = (b_j - b_1) / (2 sqrt(b_1))``. Requires ``b_1 > 0``, i.e. a
    signal with non-vanishing first coordinate.
    """
    b = np.asarray(b, dtype=float)
    floor = tol * max(1.0, float(np.abs(b).max()))
    if b[0] <= floor:
        raise NonGenericSignal("first measurement is non-positive: z_1 is (near) zero")
    z1 = np.sqrt(b[0])
    z = np.empty_like(b)
    z[0] = z1
    z[1:] = (b[1:] - b[0]) / (2.0 * z1)
    return Signal.real(z)


def anchored_complex_ensemble(n: int) -> MeasurementEnsemble:
    """2n-1 split measurements pivoting on the first coordinate.

    The first n matrices measure ``|z_1|^2`` and ``|z_1|^2 + 2 Re(conj(z_1) z_j)``;
    the remaining n-1 measure ``|z_1|^2 + 2 Im(conj(z_1) z_j)``. A generic
    complex signal is determined up to global phase.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    e = np.eye(n)
    pairs = []
    e11 = np.outer(e[0], e[0])
    pairs.append((e11, np.zeros((n, n))))
    for j in range(1, n):
        pairs.append((e11 + np.outer(e[j], e[0]) + np.outer(e[0], e[j]), np.zeros((n, n))))
    for j in range(1, n):
        pairs.append((e11, np.outer(e[j], e[0]) - np.outer(e[0], e[j])))
    return ensemble_from_split_pairs(pairs)


def split_anchored_observation(b_all, n: int):
    """Split a length-(2n-1) anchored observation into its (b, c) halves."""
    b_all = np.asarray(b_all, dtype=float)
    if b_all.size != 2 * n - 1:
        raise DimensionMismatch(f"expected {2 * n - 1} measurements, got {b_all.size}")
    return b_all[:n], b_all[n:]


def solve_anchored_complex(b, c, tol: float = 1e-12) -> Signal:
    """Closed-form inverse of the anchored complex scheme.

    Fixes the phase so that ``z_1 = sqrt(b_1)`` is real positive; then
    ``Re z_j = (b_j - b_1)/(2 z_1)`` and ``Im z_j = (c_j - b_1)/(2 z_1)``.
    """
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    if c.size != b.size - 1:
        raise DimensionMismatch("need n real-part and n-1 imaginary-part measurements")
    floor = tol * max(1.0, float(np.abs(b).max()), float(np.abs(c).max()) if c.size else 0.0)
    if b[0] <= floor:
        raise NonGenericSignal("first measurement is non-positive: z_1 is (near) zero")
    z1 = np.sqrt(b[0])
    x = np.empty_like(b)
    y = np.zeros_like(b)
    x[0] = z1
    x[1:] = (b[1:] - b[0]) / (2.0 * z1)
    y[1:] = (c - b[0]) / (2.0 * z1)
    return Signal.complex_split(x, y)
