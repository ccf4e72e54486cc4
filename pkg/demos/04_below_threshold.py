"""Special measurement schemes that beat the generic threshold.

Generic measurements need k = n+1 (real) or k = 2n (complex), but carefully
chosen matrices do better: anchoring every measurement on the first
coordinate gives closed-form recovery from n real or 2n-1 complex
measurements. The catch is fragility: the scheme dies on signals with
z_1 = 0, and no ensemble of rank-one projectors can pull off the same trick
(their censuses below the threshold always carry 2^(n-1) sign classes).
"""

import numpy as np

from algphase import (
    Mode,
    NonGenericSignal,
    ProjectorSpec,
    Signal,
    anchored_complex_ensemble,
    anchored_ensemble,
    count_solutions,
    forward_measure,
    make_ensemble,
    sample_signal,
    signal_rel_error,
    solve_anchored_complex,
    solve_anchored_real,
    split_anchored_observation,
)

rng = np.random.default_rng(4)

# ---- real case: n measurements, closed form ------------------------------
E = anchored_ensemble(3)
z = Signal.real(np.array([1.0, 2.0, 3.0]))
obs = forward_measure(z, E)
print("anchored measurements of (1,2,3):", obs.b)     # (1, 5, 7)
print("closed-form inverse:", solve_anchored_real(obs.b).x)

# the pivot coordinate must not vanish
try:
    solve_anchored_real(np.array([0.0, 5.0, 7.0]))
except NonGenericSignal as exc:
    print("z_1 = 0 breaks the scheme:", exc)

# ---- complex case: 2n - 1 measurements -----------------------------------
n = 4
Ec = anchored_complex_ensemble(n)
w = sample_signal(n, Mode.COMPLEX_SPLIT, rng)
b, c = split_anchored_observation(forward_measure(w, Ec).b, n)
w_hat = solve_anchored_complex(b, c)
print(f"complex n={n} from {2 * n - 1} measurements: "
      f"phase-invariant error {signal_rel_error(w_hat, w):.1e}")

# ---- generic rank-one projectors cannot do this --------------------------
sizes = []
for trial in range(20):
    trial_rng = np.random.default_rng(400 + trial)
    x = sample_signal(3, Mode.REAL, trial_rng)
    G = make_ensemble(ProjectorSpec(n=3, rank=1, distribution="gaussian"), 3, trial_rng)
    sizes.append(count_solutions(G, forward_measure(x, G), rng=trial_rng).size)
print("census sizes for 20 generic rank-one triples at k = n:", sizes)
print("(always 2^(n-1) = 4 classes: generic measurements cannot go below n+1)")
