"""A positive case: f(t) = t^{-2/3} ln^{0.3}(e/t) against M(u) ~ u^{3/2} ln^{-2} u.

Run:  python3 demos/example2_embedded.py [--paths N]

Here 1/psi^{-1} follows f itself, psi is submultiplicative, and the verdict
is positive.  The Monte Carlo part compares ||sum a_k f_k|| with the
disjoint-sum formula and draws the sampled equicontinuity modulus, which
falls slowly (like a power of ln(1/delta)) rather than like a power of delta.
"""

import argparse

import numpy as np

from orlicz_lab import presets
from orlicz_lab.criteria import strongly_embedded_verdict, submultiplicative_check
from orlicz_lab.mc_sim import CopySpec, coefficient_corpus, equicontinuity_modulus, js_check
from orlicz_lab.orlicz_core import inverse
from orlicz_lab.span_builder import build_psi

ap = argparse.ArgumentParser()
ap.add_argument("--paths", type=int, default=1 << 16)
args = ap.parse_args()

pre = presets.example2()
psi = build_psi(pre.M, pre.f)
t = np.logspace(-8, np.log10(0.5), 200)
r = 1 / inverse(psi, t) / pre.f(t)
print(f"1/psi^-1(t) / f(t) stays in [{r.min():.3f}, {r.max():.3f}] for t in [1e-8, 0.5]")

sub = submultiplicative_check(psi)
print(f"psi(st) <= C psi(s) psi(t): holds={sub.holds}, C={sub.C:.3f}")
v = strongly_embedded_verdict(pre.M, pre.f, psi)
print(f"strongly embedded: {v.strongly_embedded}, equicontinuous: {v.equicontinuous}")

corpus = coefficient_corpus(12, 16, seed=0)
rep = js_check(pre.M, pre.f, corpus, N=args.paths, seed=0)
print(f"\nMonte Carlo against disjoint sums, {len(corpus)} profiles: ratio band {rep.band:.2f}")
for s, a, b, e in zip(rep.grid, rep.lhs, rep.rhs, rep.se):
    print(f"  support {s:4.0f}   sampled {a:8.3f} +- {e:.3f}   formula {b:8.3f}")

curve = equicontinuity_modulus(pre.M, psi, CopySpec.identical(pre.f, 8), ball_sample_size=8,
                               N=args.paths, seed=1)
print(f"\nsampled modulus ({curve.label}):")
for d, m in list(zip(curve.delta, curve.modulus))[::4]:
    print(f"  delta = 2^{np.log2(d):5.0f}   {m:.4f}")
