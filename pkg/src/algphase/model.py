"""Signals, projectors, measurement ensembles, and the forward map.

A measurement is the quadratic form ``b_i = z^T A_i z`` with ``A_i = P_i^T P_i``
for a real signal. A complex signal is stored as the split pair (x, y) and a
complex projector P as the pair ``(B, C) = (Re P*P, Im P*P)``; the measured
value ``|P(x+iy)|^2`` is the real part of the Hermitian pairing,
``x^T B x + y^T B y - 2 x^T C y``. Both maps are invariant under global sign
(real) or global phase (split), which is what makes retrieval a quotient
problem.

All types are immutable after construction; sampling takes an explicit
``numpy.random.Generator`` so callers own stream isolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatch

__all__ = [
    "Mode",
    "Distribution",
    "Signal",
    "ProjectorSpec",
    "MeasurementMatrix",
    "MeasurementEnsemble",
    "Observation",
    "sample_signal",
    "make_ensemble",
    "ensemble_from_matrices",
    "ensemble_from_split_pairs",
    "forward_measure",
    "add_noise",
    "signal_rel_error",
]


class Mode(str, Enum):
    REAL = "real"
    COMPLEX_SPLIT = "complex_split"


class Distribution(str, Enum):
    GENERIC_GAUSSIAN = "gaussian"
    HAAR_ORTHOGONAL = "haar"
    EXPLICIT = "explicit"


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Signal:
    """A length-n signal: one real vector, or a split pair (x, y) for x + iy."""

    mode: Mode
    x: np.ndarray
    y: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "x", _readonly(self.x))
        if self.x.ndim != 1 or self.x.size < 1:
            raise ValueError("signal needs a 1-d coordinate vector of length >= 1")
        if self.mode is Mode.REAL:
            if self.y is not None:
                raise ValueError("real signals carry no imaginary part")
        else:
            if self.y is None:
                raise ValueError("split signals need both coordinate vectors")
            object.__setattr__(self, "y", _readonly(self.y))
            if self.y.shape != self.x.shape:
                raise DimensionMismatch("x and y must have equal length")

    @classmethod
    def real(cls, x):
        return cls(mode=Mode.REAL, x=np.asarray(x, dtype=float))

    @classmethod
    def complex_split(cls, x, y):
        return cls(mode=Mode.COMPLEX_SPLIT, x=np.asarray(x, dtype=float),
                   y=np.asarray(y, dtype=float))

    @property
    def n(self):
        return self.x.size

    def norm(self):
        if self.mode is Mode.REAL:
            return float(np.linalg.norm(self.x))
        return float(np.sqrt(np.linalg.norm(self.x) ** 2 + np.linalg.norm(self.y) ** 2))

    def as_complex(self):
        """The underlying complex vector (imaginary part zero for real mode)."""
        if self.mode is Mode.REAL:
            return self.x.astype(complex)
        return self.x + 1j * self.y

    def lift(self):
        """Phase/sign-invariant lift: zz^T for real, (R, Phi) for split."""
        if self.mode is Mode.REAL:
            return np.outer(self.x, self.x)
        R = np.outer(self.x, self.x) + np.outer(self.y, self.y)
        Phi = np.outer(self.y, self.x) - np.outer(self.x, self.y)
        return R, Phi


@dataclass(frozen=True)
class ProjectorSpec:
    """How to draw the k projection matrices of an ensemble."""

    n: int
    rank: int = 1
    distribution: Distribution = Distribution.HAAR_ORTHOGONAL
    mode: Mode = Mode.REAL
    matrix: np.ndarray | None = None     # the fixed P for Distribution.EXPLICIT

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ambient dimension must be >= 1")
        if not 1 <= self.rank <= self.n:
            raise ValueError(f"rank must lie in [1, {self.n}]")
        if self.distribution is Distribution.EXPLICIT:
            if self.matrix is None:
                raise ValueError("explicit distribution needs a matrix")
            m = np.asarray(self.matrix)
            if m.shape != (self.rank, self.n):
                raise DimensionMismatch("explicit matrix must be rank x n")
            object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class MeasurementMatrix:
    """One lifted measurement: symmetric A, or (B symmetric, C antisymmetric).

    Symmetry is made bitwise exact at construction by (anti)symmetrizing,
    which leaves the measured values unchanged.
    """

    mode: Mode
    A: np.ndarray | None = None
    B: np.ndarray | None = None
    C: np.ndarray | None = None
    rank_bound: int | None = None

    def __post_init__(self):
        if self.mode is Mode.REAL:
            if self.A is None:
                raise ValueError("real measurement needs A")
            A = np.asarray(self.A, dtype=float)
            object.__setattr__(self, "A", _readonly((A + A.T) / 2.0))
        else:
            if self.B is None or self.C is None:
                raise ValueError("split measurement needs the pair (B, C)")
            B = np.asarray(self.B, dtype=float)
            C = np.asarray(self.C, dtype=float)
            object.__setattr__(self, "B", _readonly((B + B.T) / 2.0))
            object.__setattr__(self, "C", _readonly((C - C.T) / 2.0))

    @property
    def n(self):
        return (self.A if self.mode is Mode.REAL else self.B).shape[0]

    def measure(self, z: Signal) -> float:
        if z.mode is not self.mode or z.n != self.n:
            raise DimensionMismatch("signal does not match the measurement matrix")
        if self.mode is Mode.REAL:
            return float(z.x @ self.A @ z.x)
        # real part of (x-iy)^* (B+iC) (x+iy); the cross term carries a minus
        x, y = z.x, z.y
        return float(x @ self.B @ x + y @ self.B @ y - 2.0 * x @ self.C @ y)


@dataclass(frozen=True)
class MeasurementEnsemble:
    """An ordered tuple of k measurement matrices sharing mode and dimension."""

    matrices: tuple[MeasurementMatrix, ...]
    spec: ProjectorSpec | None = None
    seed: int | None = None

    def __post_init__(self):
        if not self.matrices:
            raise ValueError("an ensemble needs at least one measurement")
        mode, n = self.matrices[0].mode, self.matrices[0].n
        if any(m.mode is not mode or m.n != n for m in self.matrices):
            raise DimensionMismatch("all matrices must share mode and dimension")
        object.__setattr__(self, "matrices", tuple(self.matrices))

    @property
    def mode(self):
        return self.matrices[0].mode

    @property
    def n(self):
        return self.matrices[0].n

    @property
    def k(self):
        return len(self.matrices)

    def stacked(self):
        """Dense (k, n, n) array of the A_i (real mode only)."""
        if self.mode is not Mode.REAL:
            raise DimensionMismatch("stacked() is for real-mode ensembles")
        return np.stack([m.A for m in self.matrices])


@dataclass(frozen=True)
class Observation:
    """Measured values, the noise level, and (if noisy) the clean copy."""

    b: np.ndarray
    noise_sigma: float = 0.0
    clean: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "b", _readonly(self.b))
        if self.noise_sigma < 0:
            raise ValueError("noise level must be non-negative")
        if self.clean is not None:
            object.__setattr__(self, "clean", _readonly(self.clean))
            if self.clean.shape != self.b.shape:
                raise DimensionMismatch("clean copy must match b")

    @property
    def k(self):
        return self.b.size


def sample_signal(n: int, mode: Mode = Mode.REAL, rng=None) -> Signal:
    """Draw a unit-norm signal uniformly on the sphere.

    A normalized Gaussian vector is uniform on the sphere; for split mode the
    pair (x, y) is normalized jointly, i.e. the complex vector is uniform on
    the unit sphere of C^n.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng() if rng is None else rng
    if mode is Mode.REAL:
        v = rng.standard_normal(n)
        return Signal.real(v / np.linalg.norm(v))
    w = rng.standard_normal(2 * n)
    w = w / np.linalg.norm(w)
    return Signal.complex_split(w[:n], w[n:])


def _haar_frame(n, r, rng):
    """r x n real matrix with orthonormal rows, Haar-distributed."""
    g = rng.standard_normal((n, r))
    q, rr = np.linalg.qr(g)
    q = q * np.sign(np.diag(rr))[None, :]
    return q.T


def _haar_frame_complex(n, r, rng):
    """r x n complex matrix with P P* = I, Haar-distributed."""
    g = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    q, rr = np.linalg.qr(g)
    d = np.diag(rr)
    q = q * (d.conj() / np.abs(d))[None, :]
    return q.conj().T


def _split_from_complex_projector(p):
    """(B, C) with B + iC = P* P for a complex r x n projector P."""
    a = p.conj().T @ p
    return a.real, a.imag


def make_ensemble(spec: ProjectorSpec, k: int, rng=None) -> MeasurementEnsemble:
    """Draw k measurement matrices according to ``spec``.

    Real mode stores ``A_i = P_i^T P_i``; split mode stores the pair
    ``(Re P*P, Im P*P)``. Haar frames give exact orthogonal projectors
    (A^2 = A, trace = rank).
    """
    if k < 1:
        raise ValueError("need at least one measurement")
    rng = np.random.default_rng() if rng is None else rng
    n, r = spec.n, spec.rank
    mats = []
    for _ in range(k):
        if spec.mode is Mode.REAL:
            if spec.distribution is Distribution.EXPLICIT:
                p = np.asarray(spec.matrix, dtype=float)
            elif spec.distribution is Distribution.HAAR_ORTHOGONAL:
                p = _haar_frame(n, r, rng)
            else:
                p = rng.standard_normal((r, n))
            mats.append(MeasurementMatrix(mode=Mode.REAL, A=p.T @ p, rank_bound=r))
        else:
            if spec.distribution is Distribution.EXPLICIT:
                p = np.asarray(spec.matrix, dtype=complex)
            elif spec.distribution is Distribution.HAAR_ORTHOGONAL:
                p = _haar_frame_complex(n, r, rng)
            else:
                p = (rng.standard_normal((r, n)) + 1j * rng.standard_normal((r, n))) / np.sqrt(2)
            B, C = _split_from_complex_projector(p)
            mats.append(MeasurementMatrix(mode=Mode.COMPLEX_SPLIT, B=B, C=C, rank_bound=r))
    return MeasurementEnsemble(matrices=tuple(mats), spec=spec)


def ensemble_from_matrices(matrices, rank_bound=None) -> MeasurementEnsemble:
    """Wrap explicit symmetric matrices as a real-mode ensemble."""
    mats = tuple(
        MeasurementMatrix(mode=Mode.REAL, A=np.asarray(A, dtype=float), rank_bound=rank_bound)
        for A in matrices
    )
    return MeasurementEnsemble(matrices=mats)


def ensemble_from_split_pairs(pairs, rank_bound=None) -> MeasurementEnsemble:
    """Wrap explicit (B, C) pairs as a split-mode ensemble."""
    mats = tuple(
        MeasurementMatrix(mode=Mode.COMPLEX_SPLIT, B=B, C=C, rank_bound=rank_bound)
        for B, C in pairs
    )
    return MeasurementEnsemble(matrices=mats)


def forward_measure(z: Signal, ensemble: MeasurementEnsemble) -> Observation:
    """Noiseless measurements of ``z`` under the ensemble."""
    if z.mode is not ensemble.mode or z.n != ensemble.n:
        raise DimensionMismatch("signal and ensemble mode/dimension mismatch")
    b = np.array([m.measure(z) for m in ensemble.matrices])
    return Observation(b=b, noise_sigma=0.0, clean=b)


def add_noise(obs: Observation, sigma: float, rng=None) -> Observation:
    """Additive white Gaussian noise with standard deviation ``sigma``.

    The clean values are retained; sigma = 0 reproduces b exactly.
    """
    if sigma < 0:
        raise ValueError("noise level must be non-negative")
    rng = np.random.default_rng() if rng is None else rng
    clean = obs.clean if obs.clean is not None else obs.b
    noisy = obs.b + sigma * rng.standard_normal(obs.k)
    return Observation(b=noisy, noise_sigma=sigma, clean=clean)


def signal_rel_error(z_hat: Signal, z_true: Signal) -> float:
    """Relative error modulo the mode's symmetry, clipped to [0, 2].

    Real mode minimizes over the global sign; split mode minimizes over the
    global phase (closed form via the inner product of the complex vectors).
    """
    if z_hat.mode is not z_true.mode or z_hat.n != z_true.n:
        raise DimensionMismatch("signals do not match")
    denom = z_true.norm()
    if denom == 0.0:
        raise ValueError("reference signal is zero")
    if z_true.mode is Mode.REAL:
        err = min(
            np.linalg.norm(z_hat.x - z_true.x),
            np.linalg.norm(z_hat.x + z_true.x),
        )
    else:
        # align the phase explicitly: the closed form via |<a,b>| cancels
        # catastrophically when the signals nearly agree
        a, b = z_hat.as_complex(), z_true.as_complex()
        inner = np.vdot(a, b)
        phase = np.conj(inner) / abs(inner) if abs(inner) > 0 else 1.0
        err = np.linalg.norm(a - phase * b)
    return float(min(err / denom, 2.0))
