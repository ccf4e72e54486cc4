"""Reconstruction at the information-theoretic threshold k = n + 1.

n quadratic measurements are never enough for a real signal in R^n (the
equations keep 2^(n-1) sign classes of solutions); n + 1 generic ones pin the
signal down. The solver turns each measurement into a homogeneous quadric
vanishing at the signal, multiplies the quadrics up degree by degree until
only one direction of the coefficient space is left over, and reads the
signal off that direction. This script shows the codimension countdown, the
agreement of the two sweep engines, and the classical lifted least-squares
baseline that needs k = n(n+1)/2 measurements instead.
"""

import numpy as np

from algphase import (
    Mode,
    NotIdentifiable,
    ProjectorSpec,
    add_noise,
    forward_measure,
    invert_ideal_regression,
    invert_lifted_least_squares,
    make_ensemble,
    normalize_quadrics,
    sample_signal,
)

rng = np.random.default_rng(2)
n = 6
z = sample_signal(n, Mode.REAL, rng)
spec = ProjectorSpec(n=n, rank=1)

# ---- k = n + 1: the threshold ------------------------------------------
ensemble = make_ensemble(spec, n + 1, rng)
obs = forward_measure(z, ensemble)

qs = normalize_quadrics(ensemble, obs)
print(f"{qs.coeffs.shape[0]} independent quadrics; residuals at the signal:",
      float(np.abs(qs.evaluate_at(z.x)).max()))

report = invert_ideal_regression(ensemble, obs, true_signal=z)
print("codimension countdown (degree, codim):", report.degree_codims)
print(f"stopped at degree {report.stop_degree}, rel_error = {report.rel_error:.2e}")

# both sweep engines compute the same complement
nested = invert_ideal_regression(ensemble, obs, true_signal=z, method="nested")
dense = invert_ideal_regression(ensemble, obs, true_signal=z, method="dense")
print("dense vs nested engines agree:",
      float(np.abs(dense.z_hat.x - nested.z_hat.x).max()))

# ---- k = n: one measurement short --------------------------------------
short = make_ensemble(spec, n, rng)
try:
    invert_ideal_regression(short, forward_measure(z, short))
except NotIdentifiable as exc:
    print("k = n fails as it must:", exc)

# ---- more measurements stop earlier -------------------------------------
for k in (8, 11, 21):
    E = make_ensemble(spec, k, rng)
    rep = invert_ideal_regression(E, forward_measure(z, E), true_signal=z)
    print(f"k = {k:2d}: stop degree {rep.stop_degree}, rel_error {rep.rel_error:.1e}")

# ---- the lifted baseline needs k >= n(n+1)/2 ----------------------------
big = make_ensemble(spec, 21, rng)
obs_big = forward_measure(z, big)
print("lifted LS at k = 21:",
      f"{invert_lifted_least_squares(big, obs_big, true_signal=z).rel_error:.1e}")
few = invert_lifted_least_squares(ensemble, obs, true_signal=z)
print(f"lifted LS at k = {n+1}: rel_error {few.rel_error:.1e}, flags {few.flags}")

# ---- noise degrades gracefully ------------------------------------------
for sigma in (1e-6, 1e-4, 1e-2):
    E = make_ensemble(spec, 12, rng)
    noisy = add_noise(forward_measure(z, E), sigma, rng)
    rep = invert_ideal_regression(E, noisy, true_signal=z)
    print(f"sigma = {sigma:.0e}: rel_error {rep.rel_error:.1e}")
