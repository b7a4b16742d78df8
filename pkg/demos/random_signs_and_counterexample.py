"""Two L^2 scenes: random signs, and two-valued copies whose ball is not equicontinuous.

Run:  python3 demos/random_signs_and_counterexample.py

With f = 1 the copies are random signs, and the sample L^2 norm of
sum a_k eps_k reproduces ||a||_2.  With |f_k| = 2^{k/2} on a set of
measure 2^{-k-1} (and 1 elsewhere) each f_k has L^2 norm about one, yet
the mass on small sets never fades: the modulus flattens at a positive
level.  Sampling can only bound the modulus from below.  A flat lower
envelope is therefore real evidence; a decaying one would not be.
"""

import numpy as np

from orlicz_lab import presets
from orlicz_lab.mc_sim import coefficient_corpus, empirical_luxemburg, equicontinuity_modulus, sample_copies

rad = presets.rademacher(16)
batch = sample_copies(rad.copies, 1 << 16, seed=0)
print("random signs:  sample L^2 norm  vs  ||a||_2")
for a in coefficient_corpus(8, 16, seed=0):
    e = empirical_luxemburg(rad.M, a, batch)
    print(f"  {e.value:7.3f} +- {e.se:.3f}   {np.linalg.norm(a):7.3f}")

ce = presets.counterexample(16)
curve = equicontinuity_modulus(ce.M, None, ce.copies, 2.0 ** -np.arange(1, 15),
                               ball_sample_size=8, N=1 << 17, seed=0)
print(f"\ntwo-valued copies, {curve.label}; trend slope {curve.trend_slope:.4f}")
for d, m, fam in zip(curve.delta, curve.modulus, curve.family):
    print(f"  delta = 2^{np.log2(d):4.0f}   {m:.4f}   ({fam})")
