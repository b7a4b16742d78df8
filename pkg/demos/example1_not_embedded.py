"""Why t^{-2/3} ln^{-1}(e/t) spans a subspace of L^{3/2} that is not strongly embedded.

Run:  python3 demos/example1_not_embedded.py

The story in four steps: build psi from (M, f), compare 1/psi^{-1} with the
closed-form prediction, watch the L_M / L^1 ratio of the dilations grow, and
let the verdict machinery pick its route.
"""

import numpy as np

from orlicz_lab import presets
from orlicz_lab.criteria import dilation_condition, strongly_embedded_verdict
from orlicz_lab.orlicz_core import inverse
from orlicz_lab.span_builder import build_psi

pre = presets.example1(1.5)
p = 1.5
print("M(u) = u^1.5,  f(t) = t^(-2/3) ln^(-1)(e/t)")

# 1. psi tabulated from int theta(u f*(t)) dt
psi = build_psi(pre.M, pre.f)
t = np.logspace(-8, np.log10(0.5), 7)
L = np.log(np.e / t)
pred = t ** (1 / p) * L ** (1 / (2 * p))
print("\npsi^-1(t) against t^(1/p) ln^(1/(2p))(e/t):")
for ti, r in zip(t, inverse(psi, t) / pred):
    print(f"  t = {ti:8.1e}   ratio = {r:.3f}")

# 2. the dilation ratio keeps growing with n
dil = dilation_condition(pre.M, pre.f)
print(f"\n||sigma_n f||_M / ||sigma_n f||_1 over n = 1..2^20: slope {dil.trend_slope:.3f} "
      f"({dil.verdict})")
for n, a, b in list(zip(dil.grid, dil.lhs, dil.rhs))[::5]:
    print(f"  n = {n:9.0f}   ratio = {a / b:.3f}")

# 3. the verdict and the route that decided it
v = strongly_embedded_verdict(pre.M, pre.f, psi)
print(f"\nstrongly embedded: {v.strongly_embedded}   equicontinuous: {v.equicontinuous}")
print(f"index gap {v.index_gap:.2e} (uncertainty {v.gap_uncertainty:.2g}), so the indices tie")
for e in v.evidence:
    if "route" in e:
        print(f"  {e['check']}: {e['route']}")
