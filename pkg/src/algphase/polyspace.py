"""Coefficient-space toolkit for homogeneous polynomials.

Everything downstream of the measurement model works with homogeneous forms
represented as plain coefficient vectors over a fixed monomial basis:

* :func:`monomial_basis` enumerates degree-t exponents in graded
  colexicographic order (stable across runs, so serialized coefficient
  vectors are portable),
* :func:`quadric_from_matrix` turns a symmetric matrix into the coefficient
  vector of ``z -> z^T A z``,
* :func:`prolong` stacks the coefficient rows of all degree-t multiples of a
  set of quadrics and reports the numerical rank/codimension of the stack,
* :func:`null_direction` and :func:`catalecticant_extract` walk back from a
  one-dimensional complement to the point that generated it.

The coefficient convention is ``f(z) = sum_a c_a z^a`` with no hidden
multinomial weights, so evaluation is exactly the inner product with the
moment vector ``(z^a)_a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

__all__ = [
    "MonomialBasis",
    "FormCoeffs",
    "ProlongationMatrix",
    "monomial_basis",
    "moment_vector",
    "quadric_from_matrix",
    "prolong",
    "null_direction",
    "catalecticant_matrix",
    "catalecticant_extract",
    "raise_indices",
    "numerical_rank",
]

# Degrees above this are refused by prolong(); the column count C(n+t-1, t)
# grows too fast for the dense layout to be meaningful.
DEFAULT_DEGREE_CAP = 16

# Relative singular-value floor for "exact data" rank decisions.
DEFAULT_TOL_REL = 1e-8


def _colex_exponents(n, t):
    """All exponent tuples of length n summing to t, graded-colex ascending."""
    if n == 1:
        yield (t,)
        return
    for last in range(t + 1):
        for rest in _colex_exponents(n - 1, t - last):
            yield rest + (last,)


@dataclass(frozen=True)
class MonomialBasis:
    """Ordered basis of the degree-``t`` monomials in ``n`` variables.

    ``exponents`` has shape ``(size, n)``; row i is the multi-index of the
    i-th monomial in graded colexicographic order.
    """

    n: int
    t: int
    exponents: np.ndarray

    @property
    def size(self):
        return self.exponents.shape[0]

    def index_of(self, alpha):
        """Position of the multi-index ``alpha`` in the basis."""
        key = tuple(int(a) for a in alpha)
        try:
            return _index_map(self.n, self.t)[key]
        except KeyError:
            raise KeyError(f"{key} is not a degree-{self.t} exponent in {self.n} variables")

    def exponent_at(self, i):
        return tuple(int(a) for a in self.exponents[i])


@lru_cache(maxsize=None)
def monomial_basis(n: int, t: int) -> MonomialBasis:
    """Build (and cache) the degree-``t`` basis in ``n`` variables.

    The ordering is fixed once and for all: graded colex, i.e. exponents are
    sorted by the reversed tuple. For n=3, t=2 that is
    X1^2, X1*X2, X2^2, X1*X3, X2*X3, X3^2.
    """
    if n < 1:
        raise ValueError("need at least one variable")
    if t < 0:
        raise ValueError("degree must be non-negative")
    exps = np.array(list(_colex_exponents(n, t)), dtype=np.int64).reshape(-1, n)
    exps.setflags(write=False)
    basis = MonomialBasis(n=n, t=t, exponents=exps)
    assert basis.size == comb(n + t - 1, t)
    return basis


@lru_cache(maxsize=None)
def _index_map(n, t):
    basis = monomial_basis(n, t)
    return {tuple(int(a) for a in row): i for i, row in enumerate(basis.exponents)}


@lru_cache(maxsize=None)
def raise_indices(n: int, t: int) -> np.ndarray:
    """Index table linking degree t-1 to degree t.

    ``R[b, i]`` is the position in the degree-t basis of ``beta + e_i`` where
    ``beta`` is the b-th degree-(t-1) exponent. Used both for multiplying a
    form by a variable (raising) and for the down-shift
    ``m |-> (m_{beta+e_i})_beta`` of moment vectors.
    """
    low = monomial_basis(n, t - 1)
    idx = _index_map(n, t)
    table = np.empty((low.size, n), dtype=np.int64)
    for b, beta in enumerate(low.exponents):
        beta = tuple(int(x) for x in beta)
        for i in range(n):
            alpha = beta[:i] + (beta[i] + 1,) + beta[i + 1 :]
            table[b, i] = idx[alpha]
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def _product_indices(n, t):
    """``P[b, g]`` = degree-t position of (degree-(t-2) exponent b) + (degree-2 exponent g)."""
    low = monomial_basis(n, t - 2)
    quad = monomial_basis(n, 2)
    idx = _index_map(n, t)
    table = np.empty((low.size, quad.size), dtype=np.int64)
    for b, beta in enumerate(low.exponents):
        for g, gamma in enumerate(quad.exponents):
            table[b, g] = idx[tuple(int(x) for x in beta + gamma)]
    table.setflags(write=False)
    return table


def moment_vector(z, t: int) -> np.ndarray:
    """Evaluation vector ``(z^a)_a`` over the degree-t basis."""
    z = np.asarray(z, dtype=float)
    basis = monomial_basis(z.shape[0], t)
    return np.prod(z[None, :] ** basis.exponents, axis=1)


@dataclass(frozen=True)
class FormCoeffs:
    """A homogeneous form as a coefficient vector over :func:`monomial_basis`.

    Convention: ``evaluate(z) == coeffs @ moment_vector(z, t)`` exactly.
    """

    n: int
    t: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (monomial_basis(self.n, self.t).size,):
            raise ValueError("coefficient vector does not match the basis size")

    @property
    def basis(self):
        return monomial_basis(self.n, self.t)

    def evaluate(self, z):
        return float(self.coeffs @ moment_vector(z, self.t))

    def to_dict(self):
        """Debug serialization: basis descriptor plus coefficients."""
        return {
            "schema_version": 1,
            "basis": {"n": self.n, "t": self.t, "order": "graded-colex"},
            "coeffs": self.coeffs.tolist(),
        }


def quadric_from_matrix(A, tol: float = 1e-12) -> FormCoeffs:
    """Coefficients of the quadratic form ``z -> z^T A z`` for symmetric A.

    Diagonal entries land on the squared monomials, off-diagonal entries are
    doubled onto the mixed monomials, so evaluation matches the bilinear form
    exactly.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("need a square matrix")
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(A - A.T).max() > tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    basis = monomial_basis(n, 2)
    c = np.zeros(basis.size)
    for idx, gamma in enumerate(basis.exponents):
        (i,) = np.nonzero(gamma)[0][:1]
        if gamma[i] == 2:
            c[idx] = A[i, i]
        else:
            j = np.nonzero(gamma)[0][1]
            c[idx] = 2.0 * A[i, j]
    return FormCoeffs(n=n, t=2, coeffs=c)


def numerical_rank(svals, n_cols: int, tol_rel: float = DEFAULT_TOL_REL):
    """(rank, codim) from a descending singular-value list.

    Columns beyond ``len(svals)`` count as structural zeros. Values at or
    below ``tol_rel * max`` are treated as zero; an all-zero spectrum has
    rank 0.
    """
    svals = np.asarray(svals, dtype=float)
    if svals.size == 0 or svals[0] <= 0.0:
        return 0, n_cols
    rank = int(np.count_nonzero(svals > tol_rel * svals[0]))
    return rank, n_cols - rank


@dataclass(frozen=True)
class ProlongationMatrix:
    """Stacked coefficient rows of ``{X^beta * q : |beta| = t-2, q in quadrics}``.

    Row blocks follow the quadric order; within a block, the degree-(t-2)
    multiplier runs through its basis order. ``codim`` is the column count
    minus the estimated rank under ``tol_rel``.
    """

    n: int
    t: int
    matrix: np.ndarray
    n_quadrics: int
    singular_values: np.ndarray
    tol_rel: float
    rank: int
    codim: int

    @property
    def shape(self):
        return self.matrix.shape

    def to_dict(self):
        """Debug serialization: layout descriptor and spectrum, not the rows."""
        return {
            "schema_version": 1,
            "basis": {"n": self.n, "t": self.t, "order": "graded-colex"},
            "shape": list(self.matrix.shape),
            "n_quadrics": self.n_quadrics,
            "singular_values": self.singular_values.tolist(),
            "tol_rel": self.tol_rel,
            "rank": self.rank,
            "codim": self.codim,
        }


def prolong(quadrics, t: int, tol_rel: float = DEFAULT_TOL_REL,
            degree_cap: int = DEFAULT_DEGREE_CAP) -> ProlongationMatrix:
    """Degree-t component of the ideal generated by degree-2 forms.

    ``quadrics`` is a sequence of :class:`FormCoeffs` of degree 2 (or a 2-d
    coefficient array over the degree-2 basis). The returned rows span the
    degree-t piece exactly in exact arithmetic; the singular values of the
    stack are computed so callers can make rank/codimension decisions.
    """
    if t < 2:
        raise ValueError("prolongation degree must be at least 2")
    if t > degree_cap:
        raise ValueError(f"degree {t} exceeds the configured cap {degree_cap}")
    if isinstance(quadrics, np.ndarray):
        coeff_rows = np.atleast_2d(np.asarray(quadrics, dtype=float))
        n = _infer_nvars(coeff_rows.shape[1])
    else:
        quadrics = list(quadrics)
        if not quadrics:
            raise ValueError("empty quadric set")
        n = quadrics[0].n
        if any(q.t != 2 or q.n != n for q in quadrics):
            raise ValueError("all quadrics must be degree 2 in the same variables")
        coeff_rows = np.vstack([q.coeffs for q in quadrics])
    if coeff_rows.size == 0:
        raise ValueError("empty quadric set")

    s = coeff_rows.shape[0]
    n_cols = monomial_basis(n, t).size
    if t == 2:
        M = coeff_rows.copy()
    else:
        prod = _product_indices(n, t)           # (n_low, n_quad)
        n_low = prod.shape[0]
        M = np.zeros((s * n_low, n_cols))
        rows = np.arange(n_low)[:, None]
        for qi in range(s):
            block = M[qi * n_low : (qi + 1) * n_low]
            # for fixed beta the map gamma -> beta+gamma is injective,
            # so plain fancy assignment is collision-free
            block[rows, prod] = coeff_rows[qi][None, :]

    svals = np.linalg.svd(M, compute_uv=False)
    rank, codim = numerical_rank(svals, n_cols, tol_rel)
    return ProlongationMatrix(
        n=n, t=t, matrix=M, n_quadrics=s,
        singular_values=svals, tol_rel=tol_rel, rank=rank, codim=codim,
    )


def _infer_nvars(n2_size):
    # inverse of C(n+1, 2)
    n = int((np.sqrt(8 * n2_size + 1) - 1) / 2)
    if comb(n + 1, 2) != n2_size:
        raise ValueError(f"{n2_size} is not a degree-2 basis size")
    return n


def null_direction(M: ProlongationMatrix):
    """Unit right-singular vector of the smallest singular value of the stack.

    Requires ``M.codim == 1``. Also returns the relative gap between the two
    smallest singular values (structural zeros included), as a conditioning
    diagnostic; an exact rank-deficient stack reports ``inf``.
    """
    if M.codim != 1:
        raise ValueError(f"estimated codimension is {M.codim}, need exactly 1")
    _, svals, vt = np.linalg.svd(M.matrix, full_matrices=True)
    n_cols = M.matrix.shape[1]
    padded = np.zeros(n_cols)
    padded[: svals.size] = svals
    v = vt[-1]
    v = v / np.linalg.norm(v)
    if padded[-1] > 0.0:
        gap = float(padded[-2] / padded[-1])
    else:
        gap = np.inf
    return v, gap


def catalecticant_matrix(m, n: int, t: int) -> np.ndarray:
    """Matricization ``C[i, beta] = m[beta + e_i]`` of a degree-t moment vector.

    Shape (n, C(n+t-2, t-1)). Rank one exactly when m is proportional to a
    point evaluation, with left factor parallel to the point.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (monomial_basis(n, t).size,):
        raise ValueError("moment vector does not match the degree-t basis")
    R = raise_indices(n, t)       # (N_{t-1}, n)
    return m[R].T


def catalecticant_extract(m, n: int, t: int, separation: float = 0.9) -> np.ndarray:
    """Direction of the point underlying a (near-)rank-one moment vector.

    Returns the top left-singular vector of the catalecticant, sign-fixed so
    its largest-magnitude entry is positive. Raises for an all-zero input or
    when the second singular value exceeds ``separation`` times the first
    (no unambiguous rank-one structure).
    """
    if t < 2:
        raise ValueError("need degree >= 2")
    C = catalecticant_matrix(m, n, t)
    if not np.any(C):
        raise ValueError("moment vector is identically zero")
    u, s, _ = np.linalg.svd(C, full_matrices=False)
    if s.size > 1 and s[1] > separation * s[0]:
        raise ValueError(
            f"ambiguous rank-one structure: sigma2/sigma1 = {s[1] / s[0]:.3e}"
        )
    direction = u[:, 0]
    pivot = int(np.argmax(np.abs(direction)))
    if direction[pivot] < 0:
        direction = -direction
    return direction
