"""The Orlicz function psi generated by a function f, and the two-sided
comparisons between sequence norms in l_psi and function norms built from f.

``build_psi`` tabulates psi(u) = int_0^1 theta(u f*(t)) dt, where theta is
u^2 below 1 and M above 1, regularized to a convex function.  The
``EquivalenceReport`` type carries every comparison of the form
lhs(n) ~ rhs(n) over a parameter grid.
"""

import csv
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ._quad import LogRule
from .exceptions import NotInSpace, RangeError
from .measure_ops import (SampledRealFunction, dilate, disjoint_sum, distribution,
                          rearrangement, rearrangement_from_distribution)
from .norms import l2_tail, luxemburg_norm, sequence_norm
from .orlicz_core import Power, Spliced, Tabulated, delta2_constant, regularize

PSI_LOG10_RANGE = (-30.0, 3.0)
PSI_POINTS_PER_DECADE = 40
BAND = 10.0
SLOPE_TOL = 0.02


@dataclass
class EquivalenceReport:
    """Paired evaluations lhs(x), rhs(x) over a parameter grid."""

    grid: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    ratio_min: float
    ratio_max: float
    band: float
    trend_slope: Optional[float]
    verdict: str
    window: tuple = ()
    notes: List[str] = field(default_factory=list)

    @classmethod
    def build(cls, grid, lhs, rhs, band=BAND, slope_tol=SLOPE_TOL, slope=True, notes=None):
        grid = np.asarray(grid, float)
        lhs = np.asarray(lhs, float)
        rhs = np.asarray(rhs, float)
        r = lhs / rhs
        ok = np.isfinite(r) & (r > 0)
        if not ok.any():
            return cls(grid, lhs, rhs, float("nan"), float("nan"), float("inf"), None,
                       "inconclusive", (), list(notes or []) + ["no finite ratios"])
        rmin, rmax = float(r[ok].min()), float(r[ok].max())
        width = rmax / rmin
        s = None
        if slope and ok.sum() >= 3:
            s = float(np.polyfit(np.log(grid[ok]), np.log(r[ok]), 1)[0])
        if width <= band and (s is None or abs(s) <= slope_tol):
            verdict = "equivalent"
        elif s is None:
            verdict = "inconclusive"
        elif s < -slope_tol:
            verdict = "lhs-dominated"
        elif s > slope_tol:
            verdict = "rhs-dominated"
        else:
            verdict = "inconclusive"
        return cls(grid, lhs, rhs, rmin, rmax, width, s, verdict,
                   (float(grid[ok].min()), float(grid[ok].max())), list(notes or []))

    @property
    def holds(self):
        """lhs is dominated by rhs up to a constant: either equivalent or a decaying ratio."""
        return self.verdict in ("equivalent", "lhs-dominated")

    def to_dict(self):
        return {"grid": self.grid.tolist(), "lhs": self.lhs.tolist(), "rhs": self.rhs.tolist(),
                "ratio_min": self.ratio_min, "ratio_max": self.ratio_max, "band": self.band,
                "trend_slope": self.trend_slope, "verdict": self.verdict,
                "window": list(self.window), "notes": list(self.notes)}

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["parameter", "lhs", "rhs"])
            for row in zip(self.grid, self.lhs, self.rhs):
                w.writerow([repr(float(x)) for x in row])


def build_theta(M):
    """theta = u^2 on [0, 1] and M on [1, inf), regularized and normalized.

    Returns ``(theta_tilde, delta2)`` where ``delta2`` is the doubling
    constant of the raw splice; it bounds theta <= delta2 * theta_tilde.
    """
    M = M.normalized()
    if isinstance(M, Power) and M.p == 2:
        return Power(2.0), 4.0
    raw = Spliced(Power(2.0), M, 1.0)
    d2 = delta2_constant(raw, "global")
    theta = regularize(raw).normalized()
    return theta, d2


def psi_log_grid():
    lo, hi = PSI_LOG10_RANGE
    n = int(round((hi - lo) * PSI_POINTS_PER_DECADE)) + 1
    return np.linspace(lo, hi, n) * np.log(10.0)


def build_psi(M, f, log_grid=None):
    """Tabulated, normalized psi(u) = int_0^1 theta(u |f*(t)|) dt.

    The end exponents are fitted over the last decade at each end.  A
    divergent integral raises :class:`NotInSpace`.
    """
    theta, _ = build_theta(M)
    fs = rearrangement(f)
    rule = LogRule(breaks=fs.breaks)
    lf = np.asarray(fs.log_form(rule.nodes), float)
    y = psi_log_grid() if log_grid is None else np.asarray(log_grid, float)
    vals = np.empty_like(y)
    for k0 in range(0, len(y), 64):
        chunk = y[k0:k0 + 64]
        with np.errstate(invalid="ignore"):
            g = theta.logeval(chunk[:, None] + lf[None, :]) - rule.nodes[None, :]
        g = np.where(np.isnan(g), -np.inf, g)
        vals[k0:k0 + 64] = rule.integrate(g)[0]
        bad = ~np.isfinite(vals[k0:k0 + 64])
        if bad.any():
            raise NotInSpace(f"int theta(u f) diverges at u = {np.exp(chunk[bad][0]):.3g}: "
                             "f is not in L_M")
    vals = np.maximum.accumulate(vals)
    k = PSI_POINTS_PER_DECADE
    lo_exp = float((vals[k] - vals[0]) / (y[k] - y[0]))
    hi_exp = float((vals[-1] - vals[-1 - k]) / (y[-1] - y[-1 - k]))
    psi = Tabulated(y, vals, lo_exp=lo_exp, hi_exp=hi_exp)
    return psi.normalized()


def _tail_sq_integral(f, n):
    """n * int_{1/n}^1 f(s)^2 ds, via u = -ln s on [0, ln n]."""
    if n <= 1:
        return 0.0
    rule = LogRule(breaks=[b for b in f.breaks if b < np.log(n)], u_max=np.log(n), tail=False)
    g = 2 * np.asarray(f.log_form(rule.nodes), float) - rule.nodes
    return float(n * np.exp(rule.integrate(g)[0]))


def luxem2_rhs(M, f, n):
    """||sigma_n f||_{L_M} + (n int_{1/n}^1 f^2)^{1/2} for nonincreasing f."""
    fs = rearrangement(f)
    a = luxemburg_norm(M.normalized(), dilate(fs, float(n))).value
    return a + np.sqrt(_tail_sq_integral(fs, float(n)))


def luxem2_check(M, psi, f, n_grid=None, band=BAND, slope_tol=SLOPE_TOL):
    """1/psi^{-1}(1/n) against luxem2_rhs over n = 2^0 .. 2^20."""
    from .norms import fundamental_seq
    n_grid = 2.0 ** np.arange(21) if n_grid is None else np.asarray(n_grid, float)
    lhs = np.array([fundamental_seq(psi, n) for n in n_grid])
    rhs = np.array([luxem2_rhs(M, f, n) for n in n_grid])
    return EquivalenceReport.build(n_grid, lhs, rhs, band, slope_tol)


def disjoint_sum_rhs(M, a, f, dist=None):
    """||(a (x) f)* on [0,1]||_{L_M} + ||(a (x) f)* on [1,inf)||_{L^2}."""
    d = disjoint_sum(a, f, dist)
    head = rearrangement_from_distribution(d)
    return luxemburg_norm(M.normalized(), head).value + l2_tail(d)


def luxem1_check(M, psi, f, corpus, band=BAND):
    """Compare ||a||_{l_psi} with the disjoint-sum norm for every a in the corpus."""
    dist = distribution(rearrangement(f))
    lhs, rhs = [], []
    for a in corpus:
        lhs.append(sequence_norm(psi, a).value)
        rhs.append(disjoint_sum_rhs(M, a, f, dist))
    idx = np.arange(1, len(corpus) + 1)
    return EquivalenceReport.build(idx, lhs, rhs, band, slope=False,
                                   notes=["corpus comparison: no trend slope"])


def distribution_match(f, psi, tau0=10.0, decades=3, points_per_decade=20, band=BAND,
                       slope_tol=SLOPE_TOL):
    """Compare n_f(tau) with psi(1/tau) for tau in [tau0, tau0 * 10^decades].

    Verifies the direction 'distribution of f vs. that of 1/psi^{-1}'; the
    analytic hypothesis behind it is not checked here.
    """
    lo, hi = psi.log_range
    if np.isfinite(lo) and -np.log(tau0) - decades * np.log(10.0) < lo:
        raise RangeError("tau0 exceeds the representable range of psi")
    tau = tau0 * np.logspace(0, decades, decades * points_per_decade + 1)
    nf = distribution(f)(tau)
    target = psi(1.0 / tau)
    rep = EquivalenceReport.build(tau, nf, target, band, slope_tol,
                                  notes=["checked: n_f(tau) against psi(1/tau) above tau0"])
    return rep
