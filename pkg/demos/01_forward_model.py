"""Forward model tour: signals, projector ensembles, measurements, noise.

A phase-retrieval measurement never sees the signal itself, only the energy
that survives a linear projection: b_i = |P_i z|^2. This script walks through
sampling each ingredient and shows the two symmetries that make recovery a
quotient problem (global sign for real signals, global phase for complex
ones), plus the bit-exact JSON round trip used by the CLI.
"""

import numpy as np

from algphase import (
    Distribution,
    Mode,
    ProjectorSpec,
    Signal,
    add_noise,
    forward_measure,
    instance_from_payload,
    instance_to_payload,
    make_ensemble,
    sample_signal,
)

rng = np.random.default_rng(1)

# a unit-norm signal in R^5 and five Haar rank-1 projectors
z = sample_signal(5, Mode.REAL, rng)
spec = ProjectorSpec(n=5, rank=1, distribution=Distribution.HAAR_ORTHOGONAL)
ensemble = make_ensemble(spec, k=5, rng=rng)
obs = forward_measure(z, ensemble)
print("signal:", np.round(z.x, 4))
print("measurements:", np.round(obs.b, 6))

# the measurements cannot tell z from -z
minus = Signal.real(-z.x)
print("sign flip changes nothing:",
      np.array_equal(forward_measure(minus, ensemble).b, obs.b))

# rank-2 orthogonal projectors: A^2 = A and trace = 2 by construction
spec2 = ProjectorSpec(n=5, rank=2, distribution=Distribution.HAAR_ORTHOGONAL)
A = make_ensemble(spec2, k=1, rng=rng).matrices[0].A
print("rank-2 projector: trace =", round(np.trace(A), 12),
      " |A^2 - A| =", float(np.abs(A @ A - A).max()))

# complex signals are stored as split pairs (x, y); a global phase rotation
# moves both parts but leaves every measurement fixed
w = sample_signal(3, Mode.COMPLEX_SPLIT, rng)
spec_c = ProjectorSpec(n=3, rank=1, mode=Mode.COMPLEX_SPLIT)
ens_c = make_ensemble(spec_c, k=4, rng=rng)
theta = 1.2345
rotated = Signal.complex_split(
    w.x * np.cos(theta) - w.y * np.sin(theta),
    w.x * np.sin(theta) + w.y * np.cos(theta),
)
drift = np.abs(forward_measure(w, ens_c).b - forward_measure(rotated, ens_c).b).max()
print("phase rotation drift:", drift)

# additive Gaussian noise keeps the clean copy around for error studies
noisy = add_noise(obs, sigma=1e-3, rng=rng)
print("noise sample:", np.round(noisy.b - noisy.clean, 6))

# instances serialize with hex floats, so round trips are bit-exact
payload = instance_to_payload(ensemble, noisy, z, seed=1)
ens2, obs2, z2 = instance_from_payload(payload)
print("JSON round trip bit-exact:",
      np.array_equal(obs2.b, noisy.b) and np.array_equal(z2.x, z.x))
