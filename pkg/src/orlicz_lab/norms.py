"""Luxemburg norms on (0, 1], sequence norms, the L^2 tail of a disjoint sum,
and fundamental functions."""

from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq

from ._quad import LogRule
from .measure_ops import DistributionFn, SampledRealFunction
from .orlicz_core import inverse

RTOL_LAMBDA = 1e-10


class NormResult(NamedTuple):
    value: float
    residual: float
    bracket: tuple
    status: str = "ok"  # "ok" | "zero" | "not-in-space"
    quad_error: Optional[float] = None

    def to_dict(self):
        return {"value": self.value, "residual": self.residual,
                "bracket": list(self.bracket), "status": self.status}


class ModularIntegral:
    """Phi(lambda) = int_0^1 M(|x(t)|/lambda) dt, with nodes and ln|x| cached.

    Integration runs in u = -ln t, so the integrand is
    exp(ln M(ln|x(e^{-u})| - ln lambda) - u).
    """

    def __init__(self, M, x, rule=None):
        self.M = M
        self.rule = rule or LogRule(breaks=x.breaks)
        self.lx = np.asarray(x.log_form(self.rule.nodes), float)
        self.nodes = self.rule.nodes

    def log_phi(self, log_lam):
        with np.errstate(invalid="ignore"):
            g = self.M.logeval(self.lx - log_lam) - self.nodes
        g = np.where(np.isnan(g), -np.inf, g)
        return self.rule.integrate(g)

    def phi(self, lam):
        return float(np.exp(self.log_phi(np.log(lam))[0]))


def lp_norm(x, p=1.0, rule=None):
    """(int_0^1 |x|^p dt)^{1/p}, infinite when the integral diverges."""
    rule = rule or LogRule(breaks=x.breaks)
    with np.errstate(invalid="ignore"):
        g = p * np.asarray(x.log_form(rule.nodes), float) - rule.nodes
    g = np.where(np.isnan(g), -np.inf, g)
    li, _ = rule.integrate(g)
    return float(np.exp(li / p))


def luxemburg_norm(M, x, rule=None, max_factor=1e6):
    """inf{lambda > 0: int_0^1 M(|x|/lambda) dt <= 1} for x on (0, 1].

    The root of ln Phi(lambda) = 0 is bracketed from below by the L^1 norm
    (valid for convex normalized M) and from above by geometric expansion;
    Brent's method then runs on ln lambda.
    """
    if x.domain != "unit":
        raise ValueError("Luxemburg norms here are taken over (0, 1]")
    mi = ModularIntegral(M, x, rule)
    finite = np.isfinite(mi.lx)
    if not finite.any():
        return NormResult(0.0, 0.0, (0.0, 0.0), "zero")
    l1 = lp_norm(x, 1.0, mi.rule)
    if l1 == 0:
        return NormResult(0.0, 0.0, (0.0, 0.0), "zero")
    if not np.isfinite(l1):
        return NormResult(float("inf"), float("inf"), (l1, float("inf")), "not-in-space")

    def f(ll):
        return float(mi.log_phi(ll)[0])

    lo = np.log(l1)
    flo = f(lo)
    step = 1.0
    while flo < 0:
        # non-convex input: the L^1 bound is not a lower bound; walk down
        lo -= step
        step *= 2
        flo = f(lo)
    hi, fhi = lo, flo
    step = 0.5
    while fhi > 0:
        hi += step
        step *= 2
        if hi - np.log(l1) > np.log(max_factor):
            return NormResult(float("inf"), float("inf"), (l1, l1 * max_factor), "not-in-space")
        fhi = f(hi)
        if fhi <= 0:
            break
        lo = hi
    if fhi == 0:
        ll = hi
    elif flo == np.inf:
        # Phi jumps from infinity to a finite value: shrink the lower end first
        a, b = lo, hi
        for _ in range(200):
            m = 0.5 * (a + b)
            if np.isfinite(f(m)):
                b = m
            else:
                a = m
            if b - a < 1e-14:
                break
        ll = b if f(b) <= 0 else brentq(f, b, hi, xtol=1e-15, rtol=RTOL_LAMBDA)
    else:
        ll = brentq(f, lo, hi, xtol=1e-15, rtol=RTOL_LAMBDA)
    log_phi, qerr = mi.log_phi(ll)
    lam = float(np.exp(ll))
    return NormResult(lam, abs(float(np.expm1(log_phi))), (float(np.exp(lo)), float(np.exp(hi))),
                      "ok", float(qerr))


def sequence_norm(psi, a):
    """inf{lambda > 0: sum psi(|a_k|/lambda) <= 1}."""
    a = np.abs(np.asarray(a, float))
    a = a[a > 0]
    if a.size == 0:
        return NormResult(0.0, 0.0, (0.0, 0.0), "zero")
    la = np.log(a)

    def f(ll):
        return float(np.logaddexp.reduce(psi.logeval(la - ll)))

    lo, hi = float(la.max()), float(np.log(a.sum()))
    while f(lo) < 0:
        lo -= 1.0
    while f(hi) > 0:
        hi += 1.0
    if f(lo) == 0:
        ll = lo
    elif f(hi) == 0:
        ll = hi
    else:
        ll = brentq(f, lo, hi, xtol=1e-15, rtol=1e-14)
    s = float(np.exp(np.logaddexp.reduce(psi.logeval(la - ll))))
    return NormResult(float(np.exp(ll)), abs(s - 1.0), (float(np.exp(lo)), float(np.exp(hi))))


def l2_tail(d: DistributionFn):
    """L^2 norm of x* on [1, inf), read from the distribution of x.

    By the layer-cake formula the square equals int_0^inf 2 tau (n(tau) - 1)_+ dtau.
    """
    if d.total <= 1:
        return 0.0
    if d.kind == "step":
        lv, ms = d.levels, d.masses
        edges = np.concatenate([[0.0], np.cumsum(ms)])
        beyond = np.clip(edges[1:], 1.0, None) - np.clip(edges[:-1], 1.0, None)
        return float(np.sqrt(np.sum(lv ** 2 * beyond)))
    lt = d.log_tau
    # only levels where n(tau) > 1 contribute; resample that window finely
    above = lt[np.exp(d.log_eval(lt)) > 1.0]
    if above.size == 0:
        return float(np.sqrt(np.exp(2 * lt[0]) * max(d.total - 1.0, 0.0)))
    if d.tail_slope is not None and above[-1] >= lt[-1]:
        return float("inf")
    top = min(above[-1] + 1.0, lt[-1])
    y = np.unique(np.concatenate([lt[(lt >= lt[0]) & (lt <= top)], np.linspace(lt[0], top, 20001)]))
    excess = np.clip(np.exp(d.log_eval(y)) - 1.0, 0.0, None)
    integrand = 2.0 * np.exp(2 * y) * excess
    body = (np.trapezoid if hasattr(np, "trapezoid") else np.trapz)(integrand, y)
    head = np.exp(2 * y[0]) * max(d.total - 1.0, 0.0)
    return float(np.sqrt(head + body))


def fundamental_Lm(M, u):
    """phi_{L_M}(u) = 1 / M^{-1}(1/u)."""
    u = np.asarray(u, float)
    out = 1.0 / inverse(M, 1.0 / u)
    return out if np.ndim(out) else float(out)


def fundamental_seq(psi, n):
    """phi_{l_psi}(n) = 1 / psi^{-1}(1/n)."""
    n = np.asarray(n, float)
    out = 1.0 / inverse(psi, 1.0 / n)
    return out if np.ndim(out) else float(out)


def sup_proxy(x):
    """Largest value on the default log grid, a stand-in for the L^inf norm."""
    _, v = x.grid()
    return float(np.max(v))


__all__ = ["NormResult", "ModularIntegral", "lp_norm", "luxemburg_norm", "sequence_norm",
           "l2_tail", "fundamental_Lm", "fundamental_seq", "sup_proxy", "SampledRealFunction"]
