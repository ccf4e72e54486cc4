"""Census, Jacobian certificates, thresholds, and the fixture ensembles.

The diagonal ensemble admits full enumeration by hand (every sign pattern of
the coordinate roots), which makes its censuses exact oracles.
"""

import numpy as np
import pytest

from algphase.errors import DimensionMismatch
from algphase.identifiability import (
    StabilityClass,
    classify_diag_plus_ones,
    compare_projector_classes,
    count_solutions,
    diag_ensemble,
    diag_plus_ones_ensemble,
    estimate_generic_threshold,
    jacobian_rank,
)
from algphase.model import (
    Mode,
    Observation,
    ProjectorSpec,
    Signal,
    forward_measure,
    make_ensemble,
    sample_signal,
)


# ---------------------------------------------------------------------------
# jacobian rank
# ---------------------------------------------------------------------------


def test_jacobian_diag_full_rank():
    rank, smin = jacobian_rank(diag_ensemble(3), np.array([1.0, 2.0, 3.0]))
    assert rank == 3
    assert smin == pytest.approx(2.0, abs=1e-12)     # smallest row is 2*z_1


def test_jacobian_diag_rank_drop_on_axis():
    rank, smin = jacobian_rank(diag_ensemble(3), np.array([0.0, 2.0, 3.0]))
    assert rank == 2
    assert smin == pytest.approx(0.0, abs=1e-12)


def test_jacobian_diag_plus_ones_full_rank():
    rank, _ = jacobian_rank(diag_plus_ones_ensemble(), np.array([1.0, 2.0, 3.0]))
    assert rank == 3


def test_jacobian_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        jacobian_rank(diag_ensemble(3), np.ones(4))


# ---------------------------------------------------------------------------
# census on enumerable fixtures
# ---------------------------------------------------------------------------


def test_census_diag_all_sign_classes():
    census = count_solutions(diag_ensemble(3), Observation(b=np.array([1.0, 4.0, 9.0])),
                             rng=np.random.default_rng(0))
    assert census.size == 4
    # enumeration oracle: representatives must be exactly {(±1, ±2, 3)} after
    # canonicalization (largest-magnitude entry positive)
    found = sorted(tuple(np.round(r.x, 6)) for r in census.representatives)
    expected = sorted([(-1.0, -2.0, 3.0), (-1.0, 2.0, 3.0), (1.0, -2.0, 3.0), (1.0, 2.0, 3.0)])
    assert found == expected


def test_census_residuals_within_bound():
    obs = Observation(b=np.array([1.0, 4.0, 9.0]))
    census = count_solutions(diag_ensemble(3), obs, rng=np.random.default_rng(1))
    assert max(census.residuals) <= 1e-8 * np.abs(obs.b).max()


def test_census_symmetry_closure():
    # no two representatives may be sign-equivalent
    census = count_solutions(diag_ensemble(3), Observation(b=np.array([1.0, 4.0, 9.0])),
                             rng=np.random.default_rng(2))
    reps = [r.x for r in census.representatives]
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            d = min(np.linalg.norm(reps[i] - reps[j]), np.linalg.norm(reps[i] + reps[j]))
            assert d > 1e-3


def test_census_monotone_under_added_measurements():
    z = Signal.real(np.array([1.0, 2.0, 3.0]))
    diag = diag_ensemble(3)
    plus = diag_plus_ones_ensemble()       # same three plus one more
    c_small = count_solutions(diag, forward_measure(z, diag), rng=np.random.default_rng(3))
    c_large = count_solutions(plus, forward_measure(z, plus), rng=np.random.default_rng(3))
    assert c_large.size <= c_small.size


def test_census_diag_plus_ones_fixtures():
    E = diag_plus_ones_ensemble()
    for z, expected in [((1.0, 2.0, 3.0), 1), ((1.0, 1.0, -1.0), 3), ((0.0, 1.0, -1.0), 1)]:
        obs = forward_measure(Signal.real(np.array(z)), E)
        census = count_solutions(E, obs, rng=np.random.default_rng(4))
        assert census.size == expected, z


def test_census_jacobian_soundness_on_axis():
    # rank-deficient signals sit next to signals with a different census
    E = diag_ensemble(3)
    z0 = np.array([0.0, 2.0, 3.0])
    rank, _ = jacobian_rank(E, z0)
    assert rank < 3
    c0 = count_solutions(E, forward_measure(Signal.real(z0), E),
                         rng=np.random.default_rng(5))
    z_eps = z0 + np.array([1e-3, 0.0, 0.0])
    c_eps = count_solutions(E, forward_measure(Signal.real(z_eps), E),
                            rng=np.random.default_rng(5))
    assert c0.size != c_eps.size


def test_census_cap():
    rng = np.random.default_rng(6)
    E = make_ensemble(ProjectorSpec(n=6, rank=1), 7, rng)
    obs = forward_measure(sample_signal(6, Mode.REAL, rng), E)
    with pytest.raises(ValueError):
        count_solutions(E, obs, rng=rng)


def test_census_positive_dimensional_detection():
    # a single measurement in n=2 leaves a curve of solutions: the census
    # must not report a tight unique cluster
    rng = np.random.default_rng(7)
    E = make_ensemble(ProjectorSpec(n=2, rank=2), 1, rng)
    obs = forward_measure(sample_signal(2, Mode.REAL, rng), E)
    census = count_solutions(E, obs, rng=rng)
    assert not (census.unique and census.isolated)


def test_census_complex_phase_clustering():
    # all phase rotations of one solution must land in a single orbit class
    rng = np.random.default_rng(8)
    z = sample_signal(2, Mode.COMPLEX_SPLIT, rng)
    E = make_ensemble(ProjectorSpec(n=2, rank=1, mode=Mode.COMPLEX_SPLIT), 4, rng)
    obs = forward_measure(z, E)
    census = count_solutions(E, obs, rng=rng)
    assert census.size == 1
    assert census.cluster_sizes[0] > 10


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------


def test_threshold_real_census_oracle():
    spec = ProjectorSpec(n=3, rank=1)
    report = estimate_generic_threshold(spec, range(2, 6), 30, 101, oracle="census")
    assert report.lambda_hat == 4


def test_threshold_rank_two_unchanged():
    spec = ProjectorSpec(n=3, rank=2)
    report = estimate_generic_threshold(spec, range(3, 6), 30, 102, oracle="census")
    assert report.lambda_hat == 4


def test_threshold_complex_split():
    spec = ProjectorSpec(n=2, rank=1, mode=Mode.COMPLEX_SPLIT)
    report = estimate_generic_threshold(spec, range(2, 6), 30, 103, oracle="census")
    assert report.lambda_hat == 4          # 2n for n = 2


def test_threshold_solver_oracle():
    spec = ProjectorSpec(n=6, rank=1)
    report = estimate_generic_threshold(spec, range(6, 9), 20, 104, oracle="solver")
    assert report.frequencies[0] <= 0.2    # k = n: below threshold
    assert report.lambda_hat == 7


def test_threshold_deterministic():
    spec = ProjectorSpec(n=3, rank=1)
    a = estimate_generic_threshold(spec, range(3, 5), 10, 105, oracle="census")
    b = estimate_generic_threshold(spec, range(3, 5), 10, 105, oracle="census")
    assert a.frequencies == b.frequencies


def test_threshold_validates_inputs():
    spec = ProjectorSpec(n=3, rank=1)
    with pytest.raises(ValueError):
        estimate_generic_threshold(spec, [], 10, 0)
    with pytest.raises(ValueError):
        estimate_generic_threshold(spec, [3], 0, 0)
    with pytest.raises(ValueError):
        estimate_generic_threshold(spec, [3], 5, 0, oracle="tea-leaves")


def test_compare_projector_classes_below_threshold():
    # at k = n no class identifies: frequencies stay near zero
    rows = compare_projector_classes(5, [5], [1], 20, 107, oracle="solver")
    assert all(r["frequency"] <= 0.1 for r in rows)


def test_compare_projector_classes_small():
    rows = compare_projector_classes(4, [5, 6], [1], 15, 106, oracle="solver")
    # both distributions, one rank, two k values
    assert len(rows) == 4
    by_key = {(r["distribution"], r["k"]): r["frequency"] for r in rows}
    for k in (5, 6):
        assert abs(by_key[("gaussian", k)] - by_key[("haar", k)]) <= 0.2
    assert by_key[("gaussian", 5)] >= 0.8
    assert by_key[("haar", 5)] >= 0.8


# ---------------------------------------------------------------------------
# three-way classification
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("z,expected", [
    ((1.0, 2.0, 3.0), StabilityClass.PERTURBATION_STABLE),
    ((1.0, 1.0, -1.0), StabilityClass.NOT_IDENTIFIABLE),
    ((0.0, 1.0, -1.0), StabilityClass.IDENTIFIABLE_UNSTABLE),
])
def test_classification_fixtures(z, expected):
    report = classify_diag_plus_ones(np.array(z), rng=np.random.default_rng(9))
    assert report.label is expected


def test_classification_numerics_corroborate():
    stable = classify_diag_plus_ones(np.array([1.0, 2.0, 3.0]), rng=np.random.default_rng(10))
    assert stable.census_size == 1 and stable.jacobian_rank == 3
    unstable = classify_diag_plus_ones(np.array([0.0, 1.0, -1.0]), rng=np.random.default_rng(11))
    assert unstable.census_size == 1 and unstable.jacobian_rank < 3
    ambiguous = classify_diag_plus_ones(np.array([1.0, 1.0, -1.0]), rng=np.random.default_rng(12))
    assert ambiguous.census_size >= 2


def test_classification_requires_n3():
    with pytest.raises(DimensionMismatch):
        classify_diag_plus_ones(np.ones(4))
