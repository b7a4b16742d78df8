"""Quadrature over (0, 1] in the log variable u = -ln t.

Integrands are passed as logarithms so that power x log singularities at
t = 0 never overflow.  Each segment [a, b] of the u-axis is mapped through
w = ln(1 + u - a) and covered by composite 16-point Gauss-Legendre panels;
the rule is evaluated at two panel widths to give an error estimate.  Past
``U_MAX`` the integrand is continued as a power of u, which either yields a
finite tail or flags divergence.
"""

from functools import lru_cache

import numpy as np

U_MAX = 1e8
PANEL = 1.0 / 16

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def logsumexp(a, axis=-1):
    a = np.asarray(a, dtype=float)
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        s = np.sum(np.exp(a - m), axis=axis)
        out = np.log(s) + np.squeeze(m, axis=axis)
    # a segment containing +inf integrates to +inf
    return np.where(np.any(np.isposinf(a), axis=axis), np.inf, out)


@lru_cache(maxsize=256)
def _segment(a, b, panel):
    wmax = np.log1p(b - a)
    k = max(1, int(np.ceil(wmax / panel)))
    edges = np.linspace(0.0, wmax, k + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    w = (mid[:, None] + half[:, None] * _GL_X).ravel()
    lw = (np.log(half)[:, None] + np.log(_GL_W)).ravel() + w
    return a + np.expm1(w), lw


class LogRule:
    """Fixed node set for integrals of the form  int_0^{u_max} exp(g(u)) du.

    Callers evaluate ``g`` once at :attr:`nodes` (possibly with extra leading
    axes) and hand the values to :meth:`integrate`.  That keeps expensive
    per-node work, such as evaluating ln f, out of root-finding loops.
    """

    def __init__(self, breaks=(), u_max=U_MAX, panel=PANEL, tail=None):
        self.u_max = float(u_max)
        self.tail = (u_max >= U_MAX) if tail is None else tail
        cuts = sorted({float(b) for b in breaks if 0.0 < b < self.u_max})
        pts = [0.0] + cuts + [self.u_max]
        fine_u, fine_w, coarse_u, coarse_w = [], [], [], []
        for a, b in zip(pts[:-1], pts[1:]):
            if b - a <= 0:
                continue
            u, lw = _segment(a, b, panel / 2)
            fine_u.append(u)
            fine_w.append(lw)
            u, lw = _segment(a, b, panel)
            coarse_u.append(u)
            coarse_w.append(lw)
        fu, cu = np.concatenate(fine_u), np.concatenate(coarse_u)
        self._nf, self._nc = fu.size, cu.size
        self.lw_fine = np.concatenate(fine_w)
        self.lw_coarse = np.concatenate(coarse_w)
        tail_u = [0.5 * self.u_max, self.u_max] if self.tail else []
        self.nodes = np.concatenate([fu, cu, tail_u])

    def integrate(self, g):
        """Return ``(log_integral, rel_err)`` from log-integrand values at the nodes."""
        g = np.asarray(g, dtype=float)
        nf, nc = self._nf, self._nc
        fine = logsumexp(g[..., :nf] + self.lw_fine)
        coarse = logsumexp(g[..., nf:nf + nc] + self.lw_coarse)
        with np.errstate(invalid="ignore", over="ignore"):
            err = np.abs(np.expm1(coarse - fine))
        err = np.where(np.isfinite(fine), err, 0.0)
        if self.tail:
            fine = np.logaddexp(fine, _log_tail(g[..., -2], g[..., -1], self.u_max))
        return fine, err


def _log_tail(g_half, g_end, u_end):
    """Log of int_{u_end}^inf of a power of u matched at u_end/2 and u_end."""
    g_half, g_end = np.broadcast_arrays(np.asarray(g_half, float), np.asarray(g_end, float))
    out = np.full(g_end.shape, -np.inf)
    live = np.isfinite(g_end)
    with np.errstate(invalid="ignore"):
        decay = (g_half - g_end) / np.log(2.0)
    conv = live & (decay > 1.0)
    out[conv] = g_end[conv] + np.log(u_end) - np.log(decay[conv] - 1.0)
    out[live & ~conv] = np.inf
    out[np.isposinf(g_end)] = np.inf
    return out if out.ndim else float(out)


def log_integrate(logg, breaks=(), u_max=U_MAX, panel=PANEL, tail=None):
    """Integrate ``exp(logg(u))`` over [0, u_max] (plus tail); returns ``(log I, rel_err)``."""
    rule = LogRule(breaks, u_max, panel, tail)
    return rule.integrate(logg(rule.nodes))
