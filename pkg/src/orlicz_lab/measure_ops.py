"""Functions on (0, 1], their distributions, rearrangements and dilations.

A :class:`SampledRealFunction` is stored through its log-form
``L(u) = ln |x(e^{-u})|`` (``-inf`` where x vanishes), so a power times a
power of a logarithm at t = 0 becomes an affine-plus-log function of u.
Step functions additionally keep their exact steps, which makes their
distributions and rearrangements exact.
"""

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exceptions import InvariantViolation, RangeError

U_NODES_MAX = 1e8


def default_u_nodes(n=6000, u_max=U_NODES_MAX):
    """Nodes on u = -ln t in [0, u_max], uniform in ln(1+u)."""
    return np.expm1(np.linspace(0.0, np.log1p(u_max), n))


def _interp_form(x, y, lo_slope=None, hi_slope=None, lo_value=None):
    """Piecewise-linear function of u through (x, y) with linear continuation."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if hi_slope is None:
        k = max(1, len(x) // 50)
        hi_slope = (y[-1] - y[-1 - k]) / (x[-1] - x[-1 - k])
    if lo_slope is None:
        lo_slope = (y[1] - y[0]) / (x[1] - x[0])

    def form(u):
        u = np.asarray(u, float)
        out = np.interp(u, x, y)
        out = np.where(u > x[-1], y[-1] + hi_slope * (u - x[-1]), out)
        below = y[0] + lo_slope * (u - x[0]) if lo_value is None else lo_value
        return np.where(u < x[0], below, out)

    return form


@dataclass(frozen=True, eq=False)
class SampledRealFunction:
    """A function on (0, 1] (domain "unit") or (0, inf) (domain "half-line").

    ``log_form(u)`` gives ln|x(e^{-u})|.  On the unit domain only u >= 0 is
    used.  ``breaks`` lists u-locations of kinks or jumps, so quadratures
    can split there.  ``steps`` holds ``(edges, values)`` in t when the
    function is a finite step function: x = values[i] on [edges[i], edges[i+1]).
    """

    log_form: Callable
    domain: str = "unit"
    monotone: str = "general"
    breaks: tuple = ()
    steps: Optional[tuple] = None
    tag: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.domain not in ("unit", "half-line"):
            raise InvariantViolation(f"unknown domain {self.domain!r}")
        if self.monotone not in ("nonincreasing", "general"):
            raise InvariantViolation(f"unknown monotone flag {self.monotone!r}")

    # ---- construction
    @classmethod
    def power_log(cls, r, a=0.0, c=1.0):
        """x(t) = c t^{-r} ln^a(e/t) on (0, 1]."""
        lc = np.log(c)

        def form(u):
            u = np.asarray(u, float)
            return lc + r * u + a * np.log1p(np.maximum(u, 0.0))

        mono = "nonincreasing" if (r >= 0 and r + min(a, 0.0) >= 0) else "general"
        return cls(form, "unit", mono, (), None, {"kind": "power_log", "r": r, "a": a, "c": c})

    @classmethod
    def from_steps(cls, edges, values, domain="unit"):
        """Step function with value values[i] on [edges[i], edges[i+1])."""
        e = np.asarray(edges, float)
        v = np.abs(np.asarray(values, float))
        if e.ndim != 1 or e.size != v.size + 1 or np.any(np.diff(e) <= 0) or e[0] < 0:
            raise InvariantViolation("step edges must be increasing, nonnegative, one longer than values")
        if domain == "unit" and e[-1] > 1 + 1e-12:
            raise InvariantViolation("unit-interval step function extends past 1")
        ub = -np.log(e[1:]) if e[0] == 0 else -np.log(e)
        lv = np.log(np.where(v > 0, v, 1.0))
        lv = np.where(v > 0, lv, -np.inf)

        def form(u):
            t = np.exp(-np.asarray(u, float))
            i = np.searchsorted(e, t, side="right") - 1
            ok = (i >= 0) & (i < v.size)
            return np.where(ok, lv[np.clip(i, 0, v.size - 1)], -np.inf)

        mono = "nonincreasing" if np.all(np.diff(v) <= 0) and e[0] == 0 else "general"
        return cls(form, domain, mono, tuple(sorted(float(b) for b in ub if np.isfinite(b))),
                   (e, v), {"kind": "steps", "edges": e.tolist(), "values": v.tolist()})

    @classmethod
    def indicator(cls, a, c=1.0):
        """c on [0, a), zero elsewhere on (0, 1]."""
        if a >= 1:
            return cls.from_steps([0.0, 1.0], [c])
        return cls.from_steps([0.0, a, 1.0], [c, 0.0])

    @classmethod
    def constant(cls, c=1.0):
        return cls.indicator(1.0, c)

    @classmethod
    def from_log_samples(cls, u, logv, monotone="general", domain="unit", tag=None,
                         hi_slope=None):
        """Interpolate ln|x| linearly in u through samples, extrapolating the end slopes."""
        return cls(_interp_form(u, logv, hi_slope=hi_slope), domain, monotone, (), None,
                   tag or {"kind": "samples"})

    # ---- sampling
    def __call__(self, t):
        t = np.asarray(t, float)
        with np.errstate(divide="ignore"):
            out = np.exp(self.log_form(-np.log(t)))
        if self.domain == "unit":
            out = np.where(t > 1, 0.0, out)
        return out if out.ndim else float(out)

    def grid(self, t_min=1e-12, h=np.log(10.0) / 50):
        """Log-uniform abscissae t_j = exp(-j h) down to t_min and the values there."""
        j = np.arange(int(np.floor(-np.log(t_min) / h)) + 1)
        t = np.exp(-j * h)
        return t, self(t)

    def to_csv(self, path, t_min=1e-12):
        t, v = self.grid(t_min)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "value"])
            for a, b in zip(t, v):
                w.writerow([repr(float(a)), repr(float(b))])

    def abs_max_u(self):
        return U_NODES_MAX


# ------------------------------------------------------------------ distributions

@dataclass(frozen=True, eq=False)
class DistributionFn:
    """n(tau) = measure{|x| > tau}, right-continuous and nonincreasing.

    Two storage kinds exist.  "step" keeps levels (descending, positive)
    with the mass at each level, which is exact.  "interp" keeps ln n over a
    grid of ln tau.  Below the grid n equals ``total``.  Above it ln n either
    continues with ``tail_slope`` or, when that is None, drops to zero.
    """

    kind: str
    log_tau: np.ndarray = None
    log_n: np.ndarray = None
    total: float = 1.0
    tail_slope: Optional[float] = None
    levels: np.ndarray = None
    masses: np.ndarray = None
    tail_star: Optional[Callable] = None

    @classmethod
    def from_steps(cls, levels, masses):
        lv = np.asarray(levels, float)
        ms = np.asarray(masses, float)
        keep = (lv > 0) & (ms > 0)
        lv, ms = lv[keep], ms[keep]
        order = np.argsort(-lv, kind="stable")
        lv, ms = lv[order], ms[order]
        # merge equal levels
        uniq, idx = np.unique(-lv, return_index=True)
        ms = np.add.reduceat(ms, idx) if lv.size else ms
        lv = -uniq
        return cls("step", levels=lv, masses=ms, total=float(ms.sum()))

    @property
    def thresholds(self):
        return self.levels[::-1].copy() if self.kind == "step" else np.exp(self.log_tau)

    def __call__(self, tau):
        tau = np.asarray(tau, float)
        if self.kind == "step":
            # n(tau) = sum of masses with level > tau
            asc = self.levels[::-1]
            cum = np.concatenate([[0.0], np.cumsum(self.masses[::-1])])
            k = np.searchsorted(asc, tau, side="right")
            out = self.total - cum[k]
            out = np.maximum(out, 0.0)
        else:
            with np.errstate(divide="ignore"):
                out = np.exp(self.log_eval(np.log(tau)))
        return out if out.ndim else float(out)

    def log_eval(self, ltau):
        """ln n at ln tau (interp kind)."""
        if self.kind == "step":
            with np.errstate(divide="ignore"):
                return np.log(self(np.exp(ltau)))
        ltau = np.asarray(ltau, float)
        out = np.interp(ltau, self.log_tau, self.log_n)
        out = np.where(ltau < self.log_tau[0], np.log(self.total), out)
        top = ltau > self.log_tau[-1]
        if self.tail_slope is None:
            out = np.where(top, -np.inf, out)
        else:
            out = np.where(top, self.log_n[-1] + self.tail_slope * (ltau - self.log_tau[-1]), out)
        return out

    def scaled(self, c):
        """Distribution of c*x for c > 0."""
        if self.kind == "step":
            return DistributionFn.from_steps(self.levels * c, self.masses)
        ts = None if self.tail_star is None else (lambda u, g=self.tail_star: g(u) + np.log(c))
        return DistributionFn("interp", self.log_tau + np.log(c), self.log_n, self.total,
                              self.tail_slope, tail_star=ts)

    def to_csv(self, path):
        tau = self.thresholds
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tau", "n"])
            for a, b in zip(tau, self(tau)):
                w.writerow([repr(float(a)), repr(float(b))])


def _monotone_runs(y):
    """Split indices of y into maximal runs that are nondecreasing or nonincreasing."""
    d = np.sign(np.diff(y))
    runs, start, sign = [], 0, 0
    for i, s in enumerate(d):
        if s == 0:
            continue
        if sign == 0:
            sign = s
        elif s != sign:
            runs.append((start, i, sign))
            start, sign = i, s
    runs.append((start, len(y) - 1, sign if sign else 1))
    return runs


def _level_measure(u, lf, ltau, total):
    """measure{t in (0,1]: L(-ln t) > ln tau}, with L piecewise linear through (u, lf)."""
    t = np.exp(-u)
    out = np.zeros_like(ltau)
    for a, b, sign in _monotone_runs(lf):
        uu, ll, tt = u[a:b + 1], lf[a:b + 1], t[a:b + 1]
        if sign > 0:
            # L increasing in u: the set is u > u_c, i.e. t in (t_end, t_c)
            uc = np.interp(ltau, ll, uu, left=uu[0], right=uu[-1])
            part = np.exp(-uc) - tt[-1]
            part = np.where(ltau >= ll[-1], 0.0, part)
        else:
            uc = np.interp(ltau, ll[::-1], uu[::-1], left=uu[-1], right=uu[0])
            part = tt[0] - np.exp(-uc)
            part = np.where(ltau >= ll[0], 0.0, part)
        out += np.maximum(part, 0.0)
    return np.minimum(out, total)


def distribution(f, nodes=None):
    """n_f(tau) = measure{t: |f(t)| > tau}.

    Step functions are handled exactly.  Other functions on (0, 1] are
    sampled on a u-grid and split into monotone runs, and each run's level
    sets are read off by inverse interpolation.  The power-law tail of n for
    unbounded f is carried as ``tail_slope``.
    """
    if f.steps is not None:
        e, v = f.steps
        return DistributionFn.from_steps(v, np.diff(e))
    if f.domain != "unit":
        raise RangeError("pointwise half-line functions have no finite distribution here")
    u = default_u_nodes() if nodes is None else np.asarray(nodes, float)
    if f.breaks:
        b = np.asarray(f.breaks)
        u = np.unique(np.concatenate([u, b, b * (1 + 1e-12) + 1e-12]))
    lf = f.log_form(u)
    finite = np.isfinite(lf)
    if not finite.any():
        return DistributionFn.from_steps([], [])
    lo = np.min(lf[finite])
    lf_c = np.where(finite, lf, lo - 50.0)
    ltau = np.unique(lf_c[finite])
    grow = lf_c[-1] > lf_c[-2]
    n = _level_measure(u, lf_c, ltau, 1.0)
    keep = n > 0
    ltau, ln = ltau[keep], np.log(n[keep])
    total = float(_level_measure(u, lf_c, np.array([lo - 1.0]), 1.0)[0])
    tail = None
    if grow and ltau.size > 2:
        k = max(1, ltau.size // 200)
        tail = float((ln[-1] - ln[-1 - k]) / (ltau[-1] - ltau[-1 - k]))
    # prepend the flat part below min|f|
    ltau = np.concatenate([[lo - 1e-9], ltau])
    ln = np.concatenate([[np.log(total)], ln])
    ltau, idx = np.unique(ltau, return_index=True)
    return DistributionFn("interp", ltau, ln[idx], total, tail)


def rearrangement(f, u_nodes=None):
    """Nonincreasing right-continuous f* equimeasurable with |f|."""
    if isinstance(f, DistributionFn):
        return rearrangement_from_distribution(f, u_nodes)
    if f.monotone == "nonincreasing" and f.domain == "unit":
        return f
    star = rearrangement_from_distribution(distribution(f), u_nodes)
    if f.steps is not None or f.domain != "unit":
        return star
    # Where f is monotone toward t = 0 and dominates all its values further
    # out, f itself is the rearrangement; keep the closed form there.
    u = default_u_nodes()
    lf = f.log_form(u)
    ok_mono = np.concatenate([np.diff(lf) >= 0, [True]])
    ok_mono = np.flip(np.logical_and.accumulate(np.flip(ok_mono)))
    dominates = lf >= np.maximum.accumulate(lf)
    good = ok_mono & dominates
    if not good.any():
        return star
    u_b = u[int(np.argmax(good))]
    inner, outer = f.log_form, star.log_form

    def spliced(uu):
        uu = np.asarray(uu, float)
        return np.where(uu >= u_b, inner(uu), outer(uu))

    return SampledRealFunction(spliced, "unit", "nonincreasing", (float(u_b),) if u_b > 0 else (),
                               None, dict(f.tag, rearranged=True))


def rearrangement_from_distribution(d, u_nodes=None, domain="unit"):
    """f*(t) = inf{tau: n(tau) <= t}, restricted to (0, 1] for the unit domain."""
    if d.kind == "step":
        lv, ms = d.levels, d.masses
        edges = np.concatenate([[0.0], np.cumsum(ms)])
        if domain == "unit":
            cut = np.searchsorted(edges, 1.0, side="left")
            edges = np.minimum(edges[:cut + 1], 1.0)
            lv = lv[:len(edges) - 1]
            if edges[-1] < 1.0:
                edges = np.append(edges, 1.0)
                lv = np.append(lv, 0.0)
        keep = np.diff(edges) > 0
        e2 = np.concatenate([[0.0], edges[1:][keep]])
        return SampledRealFunction.from_steps(e2, lv[keep], domain)
    # interp kind: solve ln n(l) <= -u for the smallest l.  Along the grid
    # -ln n is nondecreasing, so the first occurrence of each value is the inf.
    key, idx = np.unique(-d.log_n, return_index=True)
    xs, ys = key, d.log_tau[idx]
    if d.tail_slope is not None and d.tail_slope < 0:
        hi = -1.0 / d.tail_slope
    else:
        hi = 0.0
    form = _interp_form(xs, ys, lo_slope=0.0, hi_slope=hi) if xs.size > 1 else (
        lambda u: np.full(np.shape(u), ys[0]))
    total_u = -np.log(d.total) if d.total > 0 else np.inf
    u_end = xs[-1]
    closed = d.tail_star

    def star(u):
        u = np.asarray(u, float)
        out = form(u)
        if closed is not None:
            with np.errstate(invalid="ignore"):
                out = np.where(u > u_end, closed(np.maximum(u, u_end)), out)
        return np.where(u < total_u, -np.inf, out)

    return SampledRealFunction(star, domain, "nonincreasing", (), None, {"kind": "rearrangement"})


def dilate(f, tau):
    """sigma_tau f: t -> f(t/tau), cut to (0, min(1, tau)) on the unit domain."""
    if tau <= 0:
        raise RangeError("dilation parameter must be positive")
    if tau == 1:
        return f
    lt = np.log(tau)
    if f.steps is not None:
        e, v = f.steps
        e2 = e * tau
        if f.domain == "unit" and tau > 1:
            keep = e2[:-1] < 1.0
            e2 = np.minimum(e2[:np.count_nonzero(keep) + 1], 1.0)
            v = v[:np.count_nonzero(keep)]
        elif f.domain == "unit" and e2[-1] < 1.0:
            e2 = np.append(e2, 1.0)
            v = np.append(v, 0.0)
        return SampledRealFunction.from_steps(e2, v, f.domain)
    base = f.log_form
    src_domain = f.tag.get("source_domain", f.domain)

    def form(u):
        u = np.asarray(u, float)
        w = u + lt
        out = base(np.maximum(w, 0.0) if src_domain == "unit" else w)
        return np.where((w < 0) & (src_domain == "unit"), -np.inf, out)

    breaks = [b - lt for b in f.breaks]
    if src_domain == "unit" and tau < 1:
        breaks.append(-lt)
    breaks = tuple(sorted(b for b in breaks if (b > 0 or f.domain == "half-line")))
    tag = dict(f.tag, dilation=f.tag.get("dilation", 1.0) * tau, source_domain=src_domain)
    return SampledRealFunction(form, f.domain, f.monotone, breaks, None, tag)


def _dilation_log(L, v, w_max, step):
    """max over w in [max(0,-v), w_max] of L(w + v) - L(w), for each v (u-coordinates)."""
    w = np.arange(0.0, w_max + step / 2, step)
    lw = L(w)
    if np.any(~np.isfinite(lw)):
        raise InvariantViolation("dilation function needs a strictly positive function")
    out = np.empty_like(v)
    for i, vi in enumerate(v):
        ww = w[w >= -vi]
        out[i] = np.max(L(ww + vi) - L(ww))
    return out


class DilationResult:
    """Dilation function M_h on (0,1] with its truncation diagnostics."""

    def __init__(self, func, truncation, refinement_change, v, log_values):
        self.func = func
        self.truncation = truncation
        self.refinement_change = refinement_change
        self.v = v
        self.log_values = log_values


def dilation_function(h, t_min=1e-12, step=0.02, v_max=None, domain="zero"):
    """M_h(t) = sup_{0<s<=min(1,1/t)} h(st)/h(s) for t in (0, 1].

    ``h`` may be a :class:`SampledRealFunction` or any object with a
    ``logeval`` method (an Orlicz spec, read at arguments in (0, 1]).  The
    inner sup runs over s >= ``t_min``; the change when ``t_min`` is squared
    is reported as ``refinement_change`` (log scale).
    """
    if isinstance(h, SampledRealFunction):
        L = h.log_form
    else:
        def L(u):
            return h.logeval(-np.asarray(u, float))
    w_max = -np.log(t_min)
    if v_max is None:
        v_max = w_max
    v = np.arange(0.0, v_max + step / 2, step)
    d = _dilation_log(L, v, w_max, step)
    d2 = _dilation_log(L, v[:: max(1, len(v) // 40)], 2 * w_max, step)
    change = float(np.max(np.abs(d2 - d[:: max(1, len(v) // 40)])))
    inner = _interp_form(v, d)
    v_end, d_end, L_end = v[-1], d[-1], float(L(np.array([v[-1]]))[0])

    def form(u):
        # past the computed range continue with the s = 1 term h(t)/h(1),
        # a lower bound for the supremum that is exact when s = 1 is extremal
        u = np.asarray(u, float)
        far = d_end + L(np.maximum(u, v_end)) - L_end
        return np.where(u > v_end, far, inner(u))

    func = SampledRealFunction(form, "unit", "general", (), None,
                               {"kind": "dilation_function", "t_min": t_min})
    return DilationResult(func, t_min, change, v, d)


# ------------------------------------------------------------------ disjoint sums

def group_coefficients(a):
    """Distinct nonzero |a_k| with their multiplicities."""
    a = np.abs(np.asarray(a, float))
    a = a[a > 0]
    vals, counts = np.unique(a, return_counts=True)
    return vals, counts


def disjoint_sum(a, f, dist=None):
    """Distribution of the disjoint sum of the blocks a_k f (sum of n_{a_k f}).

    Far out the largest coefficient c with multiplicity m dominates, so the
    rearrangement continues as c f*(t/m) beyond the tabulated levels.
    """
    d = distribution(f) if dist is None else dist
    vals, counts = group_coefficients(a)
    if vals.size == 0:
        return DistributionFn.from_steps([], [])
    if d.kind == "step":
        lv = np.concatenate([d.levels * c for c in vals])
        ms = np.concatenate([d.masses * m for m in counts])
        return DistributionFn.from_steps(lv, ms)
    lo = d.log_tau[0] + np.log(vals.min())
    hi = d.log_tau[-1] + np.log(vals.max())
    from .orlicz_core import big_log_grid  # shared grid shape
    grid = np.unique(np.concatenate([big_log_grid(lo, hi), d.log_tau + np.log(vals.max()),
                                     d.log_tau + np.log(vals.min())]))
    n = np.zeros_like(grid)
    for c, m in zip(vals, counts):
        with np.errstate(divide="ignore"):
            n += m * np.exp(d.log_eval(grid - np.log(c)))
    total = float(np.sum(counts) * d.total)
    with np.errstate(divide="ignore"):
        ln = np.log(n)
    keep = np.isfinite(ln)
    fs = rearrangement(f) if f.steps is None else None
    ts = None
    if fs is not None:
        lc, lm = float(np.log(vals[-1])), float(np.log(counts[-1]))
        ts = lambda u: lc + fs.log_form(np.maximum(u - lm, 0.0))
    return DistributionFn("interp", grid[keep], ln[keep], total, d.tail_slope, tail_star=ts)


# ------------------------------------------------------------------ serialization

def function_to_dict(f):
    """JSON-ready description of a function built by one of the closed-form constructors."""
    if f.tag.get("kind") in ("power_log", "steps", "samples"):
        return dict(f.tag)
    raise InvariantViolation(f"function with tag {f.tag!r} has no JSON form")


def function_from_dict(d):
    """Inverse of :func:`function_to_dict`; also accepts "indicator" and "constant"."""
    d = dict(d)
    kind = d.pop("kind", None)
    if kind == "power_log":
        return SampledRealFunction.power_log(float(d["r"]), float(d.get("a", 0.0)),
                                             float(d.get("c", 1.0)))
    if kind == "steps":
        return SampledRealFunction.from_steps(d["edges"], d["values"], d.get("domain", "unit"))
    if kind == "indicator":
        return SampledRealFunction.indicator(float(d["a"]), float(d.get("c", 1.0)))
    if kind == "constant":
        return SampledRealFunction.constant(float(d.get("c", 1.0)))
    if kind == "samples":
        f = SampledRealFunction.from_log_samples(np.asarray(d["u"], float),
                                                 np.asarray(d["log_values"], float),
                                                 d.get("monotone", "general"))
        return SampledRealFunction(f.log_form, f.domain, f.monotone, (), None, {"kind": "samples", **d})
    raise InvariantViolation(f"unknown function kind {kind!r}")
