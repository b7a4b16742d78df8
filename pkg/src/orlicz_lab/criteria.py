"""Checkable conditions for strong embedding and equicontinuity of the span
of independent copies of f in L_M.

Every verdict is three-valued.  Index comparisons only decide when the gap
clears its uncertainty; otherwise the dilation conditions are consulted and
the route taken is recorded in the evidence list.
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np

from ._quad import LogRule
from .exceptions import NotInSpace, PreconditionError
from .indices import index_at_infinity, index_at_zero
from .measure_ops import (SampledRealFunction, dilate, dilation_function, disjoint_sum,
                          distribution, rearrangement, rearrangement_from_distribution,
                          DistributionFn)
from .norms import luxemburg_norm, lp_norm, sequence_norm
from .orlicz_core import Tabulated, big_log_grid, grid_sup2, regularize, delta2_constant
from .span_builder import EquivalenceReport, build_psi, distribution_match

N_GRID = 2.0 ** np.arange(21)
INDEX_RESOLUTION = 0.01


def _norm_curve(M, f, n_grid):
    fs = rearrangement(f)
    return np.array([luxemburg_norm(M, dilate(fs, float(n))).value for n in n_grid])


def dilation_condition(M, f, n_grid=N_GRID, band=10.0, slope_tol=0.02):
    """||sigma_n f||_{L_M} against ||sigma_n f||_{L^1}; holds when the ratio stays bounded."""
    n_grid = np.asarray(n_grid, float)
    fs = rearrangement(f)
    lhs = _norm_curve(M.normalized(), fs, n_grid)
    rhs = np.array([lp_norm(dilate(fs, float(n)), 1.0) for n in n_grid])
    return EquivalenceReport.build(n_grid, lhs, rhs, band, slope_tol,
                                   notes=["lhs = L_M norm, rhs = L^1 norm of sigma_n f"])


# ---------------------------------------------------------------- majorants

@dataclass
class Majorant:
    N: object
    weights: np.ndarray
    level_mass: np.ndarray
    ratio_growth: float
    modular: float
    delta2_infinity: float
    notes: List[str] = field(default_factory=list)


def _segment_log_integral(logg, a, b):
    rule = LogRule(u_max=b - a, tail=False) if np.isfinite(b) else LogRule()
    return float(rule.integrate(logg(rule.nodes + a))[0])


def vallee_poussin_majorant(M, f, levels=200):
    """N = M * w with w constant on dyadic levels [2^k, 2^{k+1}), then regularized.

    The weights are w_k = max(1, min(k+1, R_k^{-1/2}, 2 w_{k-1})) with R_k the
    fraction of int M(|f|) coming from {|f| >= 2^k}; the doubling cap keeps
    N in Delta_2 whenever M is.  Above 2^levels the weight is frozen.
    """
    M = M.normalized()
    fs = rearrangement(f)
    rule = LogRule(breaks=fs.breaks)
    lf = np.asarray(fs.log_form(rule.nodes), float)
    total = float(np.exp(rule.integrate(M.logeval(lf) - rule.nodes)[0]))
    if not np.isfinite(total):
        raise PreconditionError("int M(|f|) diverges: f is outside the Orlicz class")
    # u-locations where f* crosses 2^k (f* nondecreasing in u)
    u_probe = np.expm1(np.linspace(0, np.log1p(1e8), 20001))
    lprobe = fs.log_form(u_probe)
    k = np.arange(levels + 1)
    lk = k * np.log(2.0)
    uk = np.interp(lk, lprobe, u_probe, left=0.0, right=np.inf)
    logg = lambda u: M.logeval(fs.log_form(u)) - u  # noqa: E731
    edges = np.concatenate([uk, [np.inf]])
    tau = np.zeros(levels + 1)
    for i in range(levels + 1):
        a, b = edges[i], edges[i + 1]
        if not np.isfinite(a) or b <= a:
            continue
        tau[i] = np.exp(_segment_log_integral(logg, a, b))
    R = np.cumsum(tau[::-1])[::-1]
    R = R / R[0] if R[0] > 0 else R
    w = np.ones(levels + 1)
    prev = 1.0
    for i in range(levels + 1):
        cap = R[i] ** -0.5 if R[i] > 0 else np.inf
        w[i] = max(1.0, min(i + 1.0, cap, 2.0 * prev))
        prev = w[i]
    y = big_log_grid()
    idx = np.clip(np.floor(y / np.log(2.0)).astype(int), -1, levels)
    logw = np.where(idx < 0, 0.0, np.log(w[np.clip(idx, 0, levels)]))
    raw = Tabulated(y, M.logeval(y) + logw, lo_exp=None, hi_exp=None)
    N = regularize(raw)
    ratio = N.logeval(np.array([levels * np.log(2.0), 0.0])) - M.logeval(np.array([levels * np.log(2.0), 0.0]))
    mod = float(np.exp(rule.integrate(N.logeval(lf) - rule.nodes)[0]))
    d2 = delta2_constant(N, "at-infinity", decades=60).value
    notes = [f"weights frozen above 2^{levels}", f"int M(|f|) = {total:.6g}"]
    return Majorant(N, w, tau, float(np.exp(ratio[0] - ratio[1])), mod, d2, notes)


def prop2a_condition(M, N, f, n_grid=N_GRID, band=10.0, slope_tol=0.02):
    """||sigma_n f||_{L_N} against ||sigma_n f||_{L_M} (sufficient for equicontinuity)."""
    n_grid = np.asarray(n_grid, float)
    M = M.normalized()
    lhs = _norm_curve(N, f, n_grid)
    rhs = _norm_curve(M, f, n_grid)
    y = np.array([0.0, 40.0, 80.0])
    growth = np.diff(N.logeval(y) - M.logeval(y))
    notes = []
    if not np.all(growth > 1e-9):
        notes.append("precondition N/M -> infinity not met on the evaluation range")
    rep = EquivalenceReport.build(n_grid, lhs, rhs, band, slope_tol, notes=notes)
    return rep


def power_log_search_family(M, eps=(0.05, 0.1, 0.25, 0.5)):
    """Majorant candidates M(u) * ln^eps(e + u), regularized."""
    out = []
    y = big_log_grid()
    for e in eps:
        raw = Tabulated(y, M.normalized().logeval(y) + e * np.log(np.logaddexp(1.0, y)))
        out.append((f"M*ln^{e}(e+u)", regularize(raw)))
    return out


# ---------------------------------------------------------------- psi-side checks

def submultiplicative_check(psi, truncations=(4, 8, 12)):
    """Grid certificate for psi(st) <= C psi(s) psi(t) on (0, 1]^2."""
    return grid_sup2(lambda ls, lt: psi.logeval(ls + lt) - psi.logeval(ls) - psi.logeval(lt),
                     truncations)


def dilation_of_psi(psi, t_min=1e-12, step=0.02):
    return dilation_function(psi, t_min=t_min, step=step)


def g_function(psi, t_min=1e-12, step=0.02):
    """Nonincreasing g on (0, 1] with n_g(tau) = min(M_psi(1/tau), 1).

    Returns ``(g, dilation)`` so callers can inspect the truncation.
    """
    dil = dilation_of_psi(psi, t_min, step)
    v, D = dil.v, np.minimum(dil.log_values, 0.0)
    D = np.minimum.accumulate(D)
    k = max(1, len(v) // 20)
    slope = float((D[-1] - D[-1 - k]) / (v[-1] - v[-1 - k]))
    d = DistributionFn("interp", v, D, 1.0, slope if slope < 0 else None)
    g = rearrangement_from_distribution(d)
    return g, dil


def inverse_reciprocal(psi):
    """f = 1/psi^{-1} as a function on (0, 1]."""
    def form(u):
        return -psi.loginv(-np.asarray(u, float))
    return SampledRealFunction(form, "unit", "nonincreasing", (), None, {"kind": "1/psi^-1"})


@dataclass
class MajorizationResult:
    violations: int
    worst_excess: float
    tested: int
    points: int


def majorization_check(psi, coeffs, tol=1e-3, t_points=400, t_min=1e-10):
    """Pointwise check of (c (x) f)* <= ||c||_psi g on (0, 1) with f = 1/psi^{-1}."""
    f = inverse_reciprocal(psi)
    g, _ = g_function(psi)
    dist_f = distribution(f)
    t = np.logspace(np.log10(t_min), 0, t_points)[:-1]
    gt = g(t)
    viol, worst = 0, 0.0
    for c in coeffs:
        nrm = sequence_norm(psi, c).value
        head = rearrangement_from_distribution(disjoint_sum(c, f, dist_f))
        lhs = head(t)
        excess = lhs / (nrm * gt) - 1.0
        worst = max(worst, float(np.max(excess)))
        viol += int(np.any(excess > tol))
    return MajorizationResult(viol, worst, len(coeffs), len(t))


@dataclass
class Lemma3Result:
    holds: bool
    worst_deficit: float
    worst_tau: float
    truncation: float


def lemma3dop_bound(psi, tol=1e-3, t_min=1e-12):
    """Check n_h(tau) >= min(M_psi(1/tau), 1) with h the dilation function of 1/psi^{-1}."""
    f = inverse_reciprocal(psi)
    dil_h = dilation_function(f, t_min=t_min)
    dil_p = dilation_of_psi(psi, t_min=t_min)
    # h is nondecreasing in u; its distribution at tau = e^{l} is e^{-v*(l)}
    H = np.maximum.accumulate(dil_h.log_values)
    v = dil_h.v
    ltau = np.linspace(0.0, H[-1], 400)
    vstar = np.interp(ltau, H, v, right=np.inf)
    ln_nh = -vstar
    D = np.interp(ltau, dil_p.v, dil_p.log_values, right=np.nan)
    target = np.minimum(D, 0.0)
    ok = np.isfinite(target)
    deficit = np.where(ok, target - ln_nh, -np.inf)
    i = int(np.argmax(deficit))
    return Lemma3Result(bool(np.max(deficit) <= tol), float(np.expm1(max(deficit[i], 0.0))),
                        float(np.exp(ltau[i])), t_min)


def main4_hypothesis(M, f, t_min=1e-12):
    """Luxemburg norm of the dilation function of f*, with the truncation used."""
    fs = rearrangement(f)
    dil = dilation_function(fs, t_min=t_min)
    nr = luxemburg_norm(M.normalized(), dil.func)
    return {"norm": nr.value, "status": nr.status, "truncation": t_min,
            "refinement_change": dil.refinement_change}


# ---------------------------------------------------------------- membership

@dataclass
class MembershipResult:
    in_LM: str
    evidence: dict


def membership_probe(M, beta, lambdas=(1.0, 1e3, 1e6), margin=0.02):
    """Is t^{-1/beta} in L_M?  Decided from the decay of the modular integrand.

    In u = -ln t the modular integrand is M(e^{u/beta}/lambda) e^{-u}.  Its
    local power-law decay exponent far out (u ~ 1e8) decides convergence:
    above 1 + margin the integral converges, below 1 - margin it diverges.
    Partial integrals up to 10^{-k} are kept as evidence.
    """
    if beta <= 0:
        raise PreconditionError("beta must be positive")
    M = M.normalized()
    U = 1e8
    decays, partial = [], {}
    for lam in lambdas:
        ll = np.log(lam)
        g = lambda u: M.logeval(u / beta - ll) - u  # noqa: E731
        ga, gb = float(g(U / 2)), float(g(U))
        if not np.isfinite(gb):
            decays.append(-np.inf if gb == np.inf else np.inf)
        else:
            decays.append((ga - gb) / np.log(2.0))
        if lam == lambdas[0]:
            for k in (2, 4, 8, 12):
                rule = LogRule(u_max=k * np.log(10.0), tail=False)
                partial[f"1e-{k}"] = float(np.exp(rule.integrate(g(rule.nodes))[0]))
    decays = np.array(decays)
    if np.any(decays > 1 + margin):
        verdict = "yes"
    elif np.all(decays < 1 - margin):
        verdict = "no"
    else:
        verdict = "inconclusive"
    return MembershipResult(verdict, {"decay_exponents": decays.tolist(), "partial_integrals": partial,
                                      "lambdas": list(lambdas)})


# ---------------------------------------------------------------- verdict

@dataclass
class CriteriaVerdict:
    strongly_embedded: str
    equicontinuous: str
    index_gap: float
    gap_uncertainty: float
    membership: str
    evidence: list = field(default_factory=list)

    def to_dict(self):
        return {"strongly_embedded": self.strongly_embedded, "equicontinuous": self.equicontinuous,
                "index_gap": self.index_gap, "gap_uncertainty": self.gap_uncertainty,
                "membership": self.membership, "evidence": self.evidence}


def _index_uncertainty(*ests):
    return max(INDEX_RESOLUTION, sum(e.uncertainty + 2 * e.fit_residual for e in ests))


def strongly_embedded_verdict(M, f, psi=None, n_grid=N_GRID, with_prop2a=True):
    """Assemble strong-embedding and equicontinuity verdicts with their evidence."""
    M = M.normalized()
    ev = []
    if psi is None:
        try:
            psi = build_psi(M, f)
        except NotInSpace as exc:
            raise PreconditionError(str(exc)) from exc
    aM, bM = index_at_infinity(M)
    ap, bp = index_at_zero(psi)
    gate_M = 1 < aM.point - 1e-9 and aM.point <= bM.point + INDEX_RESOLUTION and bM.point < 2
    gate_psi = 1 < ap.point and ap.point <= bp.point + INDEX_RESOLUTION and bp.point < 2
    gap = ap.point - bM.point
    unc = _index_uncertainty(ap, bM)
    ev.append({"check": "indices", "alpha_M_inf": aM.to_dict(), "beta_M_inf": bM.to_dict(),
               "alpha_psi_0": ap.to_dict(), "beta_psi_0": bp.to_dict(),
               "hypotheses_M": bool(gate_M), "hypotheses_psi": bool(gate_psi)})
    mem = membership_probe(M, bM.point)
    ev.append({"check": "membership", "beta": bM.point, "in_LM": mem.in_LM, **mem.evidence})
    dil = dilation_condition(M, f, n_grid)
    ev.append({"check": "dilation_condition", **dil.to_dict(), "holds": dil.holds})
    if gate_psi:
        try:
            dm = distribution_match(rearrangement(f), psi)
            ev.append({"check": "distribution_match", **dm.to_dict()})
        except Exception as exc:  # report, never fail the verdict on corroboration
            ev.append({"check": "distribution_match", "error": str(exc)})

    if gap > unc:
        se, route = "yes", "index gap clears its uncertainty"
    elif gap < -unc and mem.in_LM == "no" and gate_M:
        se, route = "no", "negative index gap with t^{-1/beta} outside L_M"
    elif dil.holds:
        se, route = "yes", "dilation condition holds (sufficient)"
    elif gate_psi and dil.verdict == "rhs-dominated":
        se, route = "no", "dilation condition fails with psi indices strictly inside (1, 2)"
    else:
        se, route = "inconclusive", "no decisive route"
    ev.append({"check": "strong_embedding_route", "route": route})

    sub = submultiplicative_check(psi)
    ev.append({"check": "submultiplicative", "holds": sub.holds, "C": sub.C,
               "witness": list(sub.witness)})
    eq, eroute = "inconclusive", "no decisive route"
    if gap > unc:
        eq, eroute = "yes", "index gap clears its uncertainty"
    elif se == "yes" and sub.holds:
        eq, eroute = "yes", "strongly embedded with submultiplicative psi"
    elif se == "no":
        eq, eroute = "no", "not strongly embedded"
    elif with_prop2a:
        maj = vallee_poussin_majorant(M, f)
        p2 = prop2a_condition(M, maj.N, f, n_grid)
        ev.append({"check": "prop2a", **p2.to_dict(), "holds": p2.holds})
        if p2.holds:
            eq, eroute = "yes", "majorant condition holds"
    ev.append({"check": "equicontinuity_route", "route": eroute})
    return CriteriaVerdict(se, eq, float(gap), float(unc), mem.in_LM, ev)
