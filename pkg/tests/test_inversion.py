"""Reconstruction: quadric normalization, threshold inversion, baselines,
and the closed-form anchored schemes."""

import numpy as np
import pytest

from algphase.errors import NonGenericMeasurement, NonGenericSignal, NotIdentifiable
from algphase.identifiability import count_solutions
from algphase.inversion import (
    anchored_complex_ensemble,
    anchored_ensemble,
    invert_ideal_regression,
    invert_lifted_least_squares,
    normalize_quadrics,
    recover_scale,
    solve_anchored_complex,
    solve_anchored_real,
    split_anchored_observation,
)
from algphase.model import (
    Mode,
    Observation,
    ProjectorSpec,
    Signal,
    add_noise,
    ensemble_from_matrices,
    forward_measure,
    make_ensemble,
    sample_signal,
    signal_rel_error,
)


def _instance(n, k, seed, rank=1, dist="haar"):
    rng = np.random.default_rng(seed)
    z = sample_signal(n, Mode.REAL, rng)
    E = make_ensemble(ProjectorSpec(n=n, rank=rank, distribution=dist), k, rng)
    return z, E, forward_measure(z, E)


# ---------------------------------------------------------------------------
# quadric normalization
# ---------------------------------------------------------------------------


def test_quadrics_vanish_at_signal():
    z, E, obs = _instance(3, 4, seed=0)
    qs = normalize_quadrics(E, obs)
    assert qs.coeffs.shape[0] == 3
    vals = qs.evaluate_at(z.x)
    assert np.abs(vals).max() <= 1e-12


def test_quadrics_full_set_sums_to_zero():
    z, E, obs = _instance(4, 6, seed=1)
    qs = normalize_quadrics(E, obs)
    assert np.abs(qs.coeffs_full.sum(axis=0)).max() <= 1e-12 * np.abs(qs.coeffs_full).max()


def test_quadrics_reject_zero_measurement():
    z, E, obs = _instance(3, 4, seed=2)
    b = obs.b.copy()
    b[1] = 0.0
    with pytest.raises(NonGenericMeasurement):
        normalize_quadrics(E, Observation(b=b))


def test_quadrics_need_two_measurements():
    z, E, obs = _instance(3, 1, seed=3)
    with pytest.raises(NonGenericMeasurement):
        normalize_quadrics(E, obs)


def test_quadrics_scaling_invariance():
    # (A_i, b_i) -> (c_i A_i, c_i b_i) leaves the quadrics unchanged
    z, E, obs = _instance(3, 5, seed=4)
    qs = normalize_quadrics(E, obs)
    rng = np.random.default_rng(5)
    scales = rng.uniform(0.5, 3.0, size=E.k)
    E2 = ensemble_from_matrices([c * m.A for c, m in zip(scales, E.matrices)])
    obs2 = Observation(b=scales * obs.b)
    qs2 = normalize_quadrics(E2, obs2)
    assert np.abs(qs.coeffs_full - qs2.coeffs_full).max() <= 1e-12


# ---------------------------------------------------------------------------
# ideal-regression inversion
# ---------------------------------------------------------------------------


def test_invert_small_threshold_instance():
    z, E, obs = _instance(3, 4, seed=10)
    rep = invert_ideal_regression(E, obs, true_signal=z)
    assert rep.rel_error <= 1e-8
    assert rep.success
    assert rep.stop_degree == 3


def test_invert_below_threshold_fails():
    z, E, obs = _instance(3, 3, seed=11)
    with pytest.raises(NotIdentifiable):
        invert_ideal_regression(E, obs)


def test_invert_n6_threshold():
    z, E, obs = _instance(6, 7, seed=12)
    rep = invert_ideal_regression(E, obs, true_signal=z)
    assert rep.rel_error <= 1e-6
    assert rep.stop_degree <= 6


def test_invert_many_measurements_stops_at_degree_two():
    z, E, obs = _instance(3, 6, seed=13)
    rep = invert_ideal_regression(E, obs, true_signal=z)
    assert rep.stop_degree == 2
    assert rep.rel_error <= 1e-8


def test_invert_sign_equivariance():
    z, E, obs = _instance(4, 5, seed=14)
    minus = Signal.real(-z.x)
    rep_plus = invert_ideal_regression(E, forward_measure(z, E), true_signal=z)
    rep_minus = invert_ideal_regression(E, forward_measure(minus, E), true_signal=minus)
    # identical observations, identical reports; global sign convention fixed
    assert (rep_plus.z_hat.x == rep_minus.z_hat.x).all()
    assert rep_plus.rel_error <= 1e-8 and rep_minus.rel_error <= 1e-8


def test_invert_consistency_residual():
    z, E, obs = _instance(5, 8, seed=15)
    rep = invert_ideal_regression(E, obs, true_signal=z)
    assert rep.success
    assert rep.residual_max <= 1e-8 * np.abs(obs.b).max()


def test_invert_measurement_scaling_invariance():
    z, E, obs = _instance(4, 5, seed=16)
    rep = invert_ideal_regression(E, obs, true_signal=z)
    scales = np.random.default_rng(17).uniform(0.5, 2.0, size=E.k)
    E2 = ensemble_from_matrices([c * m.A for c, m in zip(scales, E.matrices)])
    obs2 = Observation(b=scales * obs.b)
    rep2 = invert_ideal_regression(E2, obs2, true_signal=z)
    assert np.abs(rep.z_hat.x - rep2.z_hat.x).max() <= 1e-9


def test_invert_dense_nested_agree_clean():
    for n, k, seed in [(3, 4, 20), (4, 5, 21), (5, 6, 22), (5, 9, 23), (6, 7, 26)]:
        z, E, obs = _instance(n, k, seed=seed)
        dense = invert_ideal_regression(E, obs, true_signal=z, method="dense")
        nested = invert_ideal_regression(E, obs, true_signal=z, method="nested")
        assert dense.stop_degree == nested.stop_degree
        assert dense.degree_codims == nested.degree_codims
        assert np.abs(dense.z_hat.x - nested.z_hat.x).max() <= 1e-8


def test_invert_dense_nested_agree_noisy():
    z, E, obs = _instance(4, 8, seed=24)
    noisy = add_noise(obs, 1e-6, np.random.default_rng(25))
    dense = invert_ideal_regression(E, noisy, true_signal=z, method="dense")
    nested = invert_ideal_regression(E, noisy, true_signal=z, method="nested")
    assert dense.stop_degree == nested.stop_degree
    assert signal_rel_error(dense.z_hat, nested.z_hat) <= 1e-6


def test_invert_census_agreement():
    # whenever both the solver and the multistart census succeed, they find
    # the same signal modulo sign
    for n, seed in [(3, 30), (3, 31), (4, 32), (4, 33)]:
        z, E, obs = _instance(n, n + 1, seed=seed)
        census = count_solutions(E, obs, rng=np.random.default_rng(seed))
        rep = invert_ideal_regression(E, obs, true_signal=z)
        if census.unique and rep.success:
            assert signal_rel_error(rep.z_hat, census.representatives[0]) <= 1e-6


def test_invert_noise_returns_estimate():
    z, E, obs = _instance(6, 12, seed=34)
    noisy = add_noise(obs, 1e-2, np.random.default_rng(35))
    rep = invert_ideal_regression(E, noisy, true_signal=z)
    assert np.isfinite(rep.rel_error)
    assert rep.rel_error < 1.0          # rough but real estimate


def test_invert_dimension_one():
    z, E, obs = _instance(1, 2, seed=36)
    rep = invert_ideal_regression(E, obs, true_signal=z)
    assert rep.rel_error <= 1e-10


def test_invert_rank_two_projectors():
    z, E, obs = _instance(5, 6, seed=37, rank=2)
    rep = invert_ideal_regression(E, obs, true_signal=z)
    assert rep.rel_error <= 1e-6


# ---------------------------------------------------------------------------
# scale recovery
# ---------------------------------------------------------------------------


def test_scale_exact_on_clean_data():
    z, E, obs = _instance(4, 6, seed=40)
    res = recover_scale(z.x / np.linalg.norm(z.x), E, obs)
    assert not res.fallback
    assert signal_rel_error(res.z_hat, z) <= 1e-10


def test_scale_homogeneity_factor_two():
    # measuring 2z multiplies every b by 4; the recovered scale doubles
    z, E, obs = _instance(4, 6, seed=41)
    direction = z.x / np.linalg.norm(z.x)
    base = recover_scale(direction, E, obs)
    doubled = recover_scale(direction, E, Observation(b=4.0 * obs.b))
    assert doubled.alpha == pytest.approx(2.0 * base.alpha, rel=1e-12)


def test_scale_median_accuracy_under_noise():
    devs = []
    for trial in range(100):
        rng = np.random.default_rng(4200 + trial)
        z = sample_signal(6, Mode.REAL, rng)
        E = make_ensemble(ProjectorSpec(n=6, rank=1), 12, rng)
        obs = add_noise(forward_measure(z, E), 1e-4, rng)
        res = recover_scale(z.x, E, obs)       # true direction has norm 1
        devs.append(abs(res.alpha - 1.0))
    assert np.median(devs) <= 1e-2


def test_scale_fallback_on_indefinite_matrices():
    # anchored matrices are indefinite, so some u_i can be negative
    E = anchored_ensemble(3)
    z = Signal.real(np.array([1.0, -2.0, 3.0]))
    obs = forward_measure(z, E)
    direction = z.x / np.linalg.norm(z.x)
    res = recover_scale(direction, E, obs)
    assert signal_rel_error(res.z_hat, z) <= 1e-10


# ---------------------------------------------------------------------------
# lifted least squares
# ---------------------------------------------------------------------------


def test_lifted_square_system():
    z, E, obs = _instance(3, 6, seed=50)
    rep = invert_lifted_least_squares(E, obs, true_signal=z)
    assert rep.rel_error <= 1e-8
    assert "underdetermined" not in rep.flags


def test_lifted_large_system():
    z, E, obs = _instance(6, 21, seed=51)
    rep = invert_lifted_least_squares(E, obs, true_signal=z)
    assert rep.rel_error <= 1e-8


def test_lifted_underdetermined_flag():
    z, E, obs = _instance(6, 7, seed=52)
    rep = invert_lifted_least_squares(E, obs, true_signal=z)
    assert "underdetermined" in rep.flags


def test_solvers_agree_at_high_k():
    z, E, obs = _instance(5, 15, seed=53)
    a = invert_ideal_regression(E, obs, true_signal=z)
    b = invert_lifted_least_squares(E, obs, true_signal=z)
    assert a.success and b.success
    assert signal_rel_error(a.z_hat, b.z_hat) <= 1e-6


# ---------------------------------------------------------------------------
# anchored closed-form schemes
# ---------------------------------------------------------------------------


def test_anchored_real_fixture():
    z = solve_anchored_real(np.array([1.0, 5.0, 7.0]))
    assert np.allclose(z.x, [1.0, 2.0, 3.0], atol=0)


def test_anchored_real_flat_measurements():
    z = solve_anchored_real(np.array([4.0, 4.0, 4.0]))
    assert np.allclose(z.x, [2.0, 0.0, 0.0], atol=0)


def test_anchored_real_rejects_zero_pivot():
    with pytest.raises(NonGenericSignal):
        solve_anchored_real(np.array([0.0, 5.0, 7.0]))


def test_anchored_real_roundtrip(rng):
    E = anchored_ensemble(5)
    for _ in range(25):
        z = rng.standard_normal(5)
        if abs(z[0]) < 1e-3:
            continue
        obs = forward_measure(Signal.real(z), E)
        rec = solve_anchored_real(obs.b)
        assert signal_rel_error(rec, Signal.real(z)) <= 1e-10


def test_anchored_complex_fixture():
    # z = (1, 1+i): b = (1, 3), c = (3,)
    z = solve_anchored_complex(np.array([1.0, 3.0]), np.array([3.0]))
    assert np.allclose(z.x, [1.0, 1.0], atol=0)
    assert np.allclose(z.y, [0.0, 1.0], atol=0)


def test_anchored_complex_reduces_to_real():
    # a real signal has c_j = b_1, so the imaginary parts vanish
    b = np.array([1.0, 5.0, 7.0])
    c = np.full(2, b[0])
    z = solve_anchored_complex(b, c)
    real = solve_anchored_real(b)
    assert np.allclose(z.x, real.x, atol=0)
    assert np.abs(z.y).max() == 0.0


def test_anchored_complex_roundtrip(rng):
    E = anchored_complex_ensemble(4)
    hits = 0
    for _ in range(100):
        x, y = rng.standard_normal(4), rng.standard_normal(4)
        z = Signal.complex_split(x, y)
        obs = forward_measure(z, E)
        b, c = split_anchored_observation(obs.b, 4)
        if b[0] <= 1e-6:
            continue
        rec = solve_anchored_complex(b, c)
        assert signal_rel_error(rec, z) <= 1e-10
        hits += 1
    assert hits >= 90


def test_anchored_complex_measurement_values():
    # forward map of the split ensemble matches the closed-form predictions
    E = anchored_complex_ensemble(3)
    x = np.array([1.0, 0.5, -0.25])
    y = np.array([0.0, 2.0, 1.0])
    z = Signal.complex_split(x, y)
    zc = x + 1j * y
    obs = forward_measure(z, E)
    b, c = split_anchored_observation(obs.b, 3)
    assert b[0] == pytest.approx(abs(zc[0]) ** 2, abs=1e-14)
    for j in (1, 2):
        assert b[j] == pytest.approx(abs(zc[0]) ** 2 + 2 * (zc[0].conj() * zc[j]).real, abs=1e-12)
        assert c[j - 1] == pytest.approx(abs(zc[0]) ** 2 + 2 * (zc[0].conj() * zc[j]).imag, abs=1e-12)
