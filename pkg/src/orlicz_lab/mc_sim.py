"""Monte Carlo for independent mean-zero copies of f.

Copies are realized as eps_k * f*(U_k) with independent uniform U_k and
random signs eps_k.  Random numbers come from PCG64 streams keyed by
(seed, copy index, path block) through ``numpy.random.SeedSequence``, so a
batch is bitwise reproducible and does not depend on how many threads
produced it.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import brentq

from .measure_ops import SampledRealFunction, rearrangement
from .norms import NormResult, sequence_norm
from .orlicz_core import Power
from .span_builder import EquivalenceReport, disjoint_sum_rhs

BLOCK = 1 << 16
GENERATOR = "PCG64"
CLAMP_QUANTILE = 1.0 - 1e-8


def _threads():
    try:
        return max(1, int(os.environ.get("ORLICZ_LAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class CopySpec:
    """Either k identically distributed copies of ``base`` or explicit two-valued copies.

    For two-valued copies, copy j takes |value| ``high[j]`` on a set of
    measure ``mass[j]`` and ``low[j]`` elsewhere.
    """

    count: int
    base: Optional[SampledRealFunction] = None
    symmetrize: bool = True
    high: Optional[np.ndarray] = None
    mass: Optional[np.ndarray] = None
    low: Optional[np.ndarray] = None

    @classmethod
    def identical(cls, f, count, symmetrize=True):
        return cls(int(count), rearrangement(f), symmetrize)

    @classmethod
    def two_valued(cls, high, mass, low):
        high, mass, low = (np.asarray(x, float) for x in (high, mass, low))
        return cls(len(high), None, True, high, mass, low)

    @classmethod
    def counterexample(cls, count):
        """|f_k| = 2^{k/2} on a set of measure 2^{-k-1} and 1 elsewhere, k = 1..count."""
        k = np.arange(1, count + 1, dtype=float)
        return cls.two_valued(2.0 ** (k / 2), 2.0 ** (-k - 1), np.ones_like(k))

    def describe(self):
        if self.base is not None:
            return {"type": "identical", "count": self.count, "base": dict(self.base.tag)}
        return {"type": "two-valued", "count": self.count, "high": self.high.tolist(),
                "mass": self.mass.tolist(), "low": self.low.tolist()}


@dataclass(frozen=True, eq=False)
class SampleBatch:
    data: np.ndarray  # shape (N, k)
    seed: int
    generator: str = GENERATOR

    @property
    def paths(self):
        return self.data.shape[0]


def _column(spec, j, N, seed):
    out = np.empty(N)
    for b0 in range(0, N, BLOCK):
        n = min(BLOCK, N - b0)
        ss = np.random.SeedSequence(seed, spawn_key=(j, b0 // BLOCK))
        rng = np.random.Generator(np.random.PCG64(ss))
        # full blocks are always drawn, so a shorter run is a prefix of a longer one
        u = 1.0 - rng.random(BLOCK)[:n]  # uniform on (0, 1]
        sign = np.where(rng.random(BLOCK)[:n] < 0.5, -1.0, 1.0) if spec.symmetrize else 1.0
        if spec.base is not None:
            with np.errstate(over="ignore"):
                mag = np.exp(spec.base.log_form(-np.log(u)))
        else:
            mag = np.where(u <= spec.mass[j], spec.high[j], spec.low[j])
        out[b0:b0 + n] = sign * mag
    return out


def sample_copies(spec, N, seed):
    """N paths of the k copies described by ``spec``."""
    N = int(N)
    if N < 1:
        raise ValueError("N must be positive")
    cols = range(spec.count)
    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            data = list(ex.map(lambda j: _column(spec, j, N, seed), cols))
    else:
        data = [_column(spec, j, N, seed) for j in cols]
    return SampleBatch(np.column_stack(data), int(seed))


# ---------------------------------------------------------------- empirical norms

def _clamp(absx, q=CLAMP_QUANTILE):
    cap = np.quantile(absx, q) if absx.size > 1 else absx.max()
    lost = float(np.mean(absx > cap))
    return np.minimum(absx, cap), lost


def _root_log_lambda(M, labs, weights=None, log_total=None, hint=None):
    """Solve ln((1/N) sum w_i M(|x_i|/lambda)) = 0 in ln lambda."""
    if log_total is None:
        log_total = np.log(labs.size)
    lw = 0.0 if weights is None else np.log(weights)

    def f(ll):
        return float(np.logaddexp.reduce(M.logeval(labs - ll) + lw) - log_total)

    lo = hi = np.max(labs) if hint is None else hint
    step = 0.5
    while f(lo) < 0:
        lo -= step
        step *= 2
    step = 0.5
    while f(hi) > 0:
        hi += step
        step *= 2
    if lo == hi:
        return lo
    return brentq(f, lo, hi, xtol=1e-12, rtol=1e-12)


@dataclass
class EmpiricalNorm:
    value: float
    se: float
    tail_loss: float
    seed: int
    generator: str

    def as_norm_result(self):
        return NormResult(self.value, 0.0, (self.value - self.se, self.value + self.se))


def bootstrap_weights(N, B=100, boot_seed=12345):
    """Poisson(1) resampling weights, the large-N form of the multinomial bootstrap.

    Sharing one weight matrix across profiles gives a paired bootstrap.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(boot_seed)))
    return rng.poisson(1.0, size=(B, N)).astype(float)


def empirical_luxemburg(M, a, batch, B=100, boot_seed=12345, clamp=True, weights=None):
    """Luxemburg norm of S = sum a_k f_k from samples, with a bootstrap standard error.

    Values above the 1 - 1e-8 empirical quantile are clamped; the fraction
    affected is returned as ``tail_loss``.
    """
    a = np.asarray(a, float)
    S = batch.data[:, :a.size] @ a
    absx = np.abs(S)
    lost = 0.0
    if clamp:
        absx, lost = _clamp(absx)
    N = absx.size
    if not np.any(absx > 0):
        return EmpiricalNorm(0.0, 0.0, lost, batch.seed, batch.generator)
    with np.errstate(divide="ignore"):
        labs = np.log(absx)
    ll = _root_log_lambda(M, labs, log_total=np.log(N))
    se = 0.0
    if B or weights is not None:
        W = bootstrap_weights(N, B, boot_seed) if weights is None else weights
        grid = ll + np.linspace(-0.8, 0.8, 33)
        with np.errstate(invalid="ignore"):
            Mv = np.exp(M.logeval(labs[None, :] - grid[:, None]))  # (G, N)
        Mv = np.nan_to_num(Mv, nan=0.0)
        phi = W @ Mv.T / N  # (B, G)
        roots = []
        for b, row in enumerate(phi):
            with np.errstate(divide="ignore"):
                lr = np.log(row)
            k = np.flatnonzero(np.diff(np.sign(lr)) != 0)
            if k.size:
                i = k[0]
                roots.append(grid[i] + (grid[i + 1] - grid[i]) * lr[i] / (lr[i] - lr[i + 1]))
            else:
                # the resampled root left the grid: solve the weighted equation directly
                w = W[b]
                use = (w > 0) & np.isfinite(labs)
                roots.append(_root_log_lambda(M, labs[use], weights=w[use], log_total=np.log(N)))
        se = float(np.std(np.exp(roots), ddof=1)) if len(roots) > 1 else float("nan")
    return EmpiricalNorm(float(np.exp(ll)), se, lost, batch.seed, batch.generator)


def js_check(M, f, corpus, N=100_000, seed=0, B=100, band=10.0, slope_tol=0.05):
    """Empirical ||sum a_k f_k||_{L_M} against the disjoint-sum expression, per profile."""
    M = M.normalized()
    k = max(len(a) for a in corpus)
    batch = sample_copies(CopySpec.identical(f, k), N, seed)
    W = bootstrap_weights(N, B)
    lhs, rhs, se, supp = [], [], [], []
    for a in corpus:
        e = empirical_luxemburg(M, a, batch, weights=W)
        lhs.append(e.value)
        se.append(e.se)
        rhs.append(disjoint_sum_rhs(M, a, f))
        supp.append(np.count_nonzero(a))
    rep = EquivalenceReport.build(np.asarray(supp, float), lhs, rhs, band, slope_tol,
                                  notes=["parameter = support size of the profile",
                                         f"seed={seed}", f"generator={GENERATOR}", f"paths={N}"])
    rep.se = np.asarray(se)
    return rep


def coefficient_corpus(size=50, k=16, seed=0):
    """Coefficient profiles cycling through flat, geometric, sparse and dense Gaussian shapes."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 11])))
    out = []
    for i in range(size):
        kind = i % 4
        if kind == 0:
            out.append(np.ones(1 + (i // 4) % k))
        elif kind == 1:
            out.append(rng.uniform(0.3, 0.95) ** np.arange(k))
        elif kind == 2:
            a = np.zeros(k)
            idx = rng.choice(k, size=rng.integers(1, k // 2 + 1), replace=False)
            a[idx] = rng.standard_normal(idx.size)
            out.append(a)
        else:
            out.append(rng.standard_normal(k))
    return out


# ---------------------------------------------------------------- equicontinuity

def ball_directions(k, per_family, seed):
    """Coefficient directions from dense, sparse and geometric families plus the basis vectors."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 7])))
    out, fam = [], []
    for _ in range(per_family):
        out.append(rng.standard_normal(k))
        fam.append("dense")
    for _ in range(per_family):
        a = np.zeros(k)
        m = rng.integers(1, max(2, k // 4) + 1)
        idx = rng.choice(k, size=m, replace=False)
        a[idx] = rng.standard_normal(m)
        out.append(a)
        fam.append("sparse")
    for _ in range(per_family):
        r = rng.uniform(0.3, 0.95)
        a = r ** np.arange(k) * rng.choice([-1.0, 1.0], k)
        out.append(rng.permutation(a))
        fam.append("geometric")
    for j in range(k):
        e = np.zeros(k)
        e[j] = 1.0
        out.append(e)
        fam.append("basis")
    return out, fam


def _top_delta_norms(M, x_sorted_log, deltas, N):
    """Empirical ||x* chi_[0,delta]||_{L_M} for each delta, from sorted ln|x| (descending)."""
    if isinstance(M, Power):
        # homogeneous case: lambda^p = scale * (1/N) sum of the top |x|^p, via cumulative sums
        p = M.p
        top = x_sorted_log[0]
        c = np.concatenate([[0.0], np.cumsum(np.exp(p * (x_sorted_log - top)))])
        r = np.asarray(deltas, float) * N
        full = np.minimum(np.floor(r).astype(int), x_sorted_log.size)
        nxt = np.exp(p * (x_sorted_log[np.minimum(full, x_sorted_log.size - 1)] - top))
        s = c[full] + np.where(full < x_sorted_log.size, (r - full) * nxt, 0.0)
        return np.exp(top + (np.log(M.scale * s / N)) / p)
    out = []
    hint = None
    for d in deltas:
        r = d * N
        full = min(int(np.floor(r)), x_sorted_log.size)
        frac = r - full if full < x_sorted_log.size else 0.0
        labs = x_sorted_log[:full + (1 if frac > 0 else 0)]
        w = np.ones(labs.size)
        if frac > 0:
            w[-1] = frac
        if labs.size == 0:
            out.append(0.0)
            continue
        ll = _root_log_lambda(M, labs, weights=w, log_total=np.log(N), hint=hint)
        hint = ll
        out.append(float(np.exp(ll)))
    return np.array(out)


@dataclass
class ModulusCurve:
    delta: np.ndarray
    modulus: np.ndarray
    family: List[str]
    trend_slope: float
    label: str = "sampled lower envelope"
    seed: int = 0
    paths: int = 0
    notes: List[str] = field(default_factory=list)

    def to_dict(self):
        return {"delta": self.delta.tolist(), "modulus": self.modulus.tolist(),
                "family": list(self.family), "trend_slope": self.trend_slope,
                "label": self.label, "seed": self.seed, "paths": self.paths,
                "notes": list(self.notes)}


def equicontinuity_modulus(M, psi, spec, delta_grid=None, ball_sample_size=64, N=1 << 18,
                           seed=0, batch=None, trend_decades=3):
    """delta -> max over sampled unit-ball elements of ||x* chi_[0,delta]||_{L_M}.

    Unit-ball elements are x = sum a_k f_k with ||a||_psi = 1, or, when
    ``psi`` is None, x normalized by its empirical L_M norm.  The sup over
    the ball is not computable, so the curve is a lower envelope.  The trend
    slope is that of ln modulus against ln(1/delta) over the last
    ``trend_decades`` decades of the delta grid.
    """
    M = M.normalized()
    if delta_grid is None:
        delta_grid = 2.0 ** -np.arange(1, 21)
    deltas = np.asarray(delta_grid, float)
    if batch is None:
        batch = sample_copies(spec, N, seed)
    N = batch.paths
    dirs, fams = ball_directions(batch.data.shape[1], ball_sample_size, seed)
    best = np.zeros(deltas.size)
    who = ["" for _ in deltas]
    for a, fam in zip(dirs, fams):
        if psi is not None:
            a = a / sequence_norm(psi, a).value
        x = np.abs(batch.data @ a)
        x = x[x > 0]
        lx = np.sort(np.log(x))[::-1]
        if psi is None:
            lx = lx - np.log(_top_delta_norms(M, lx, [1.0], N)[0])
        m = _top_delta_norms(M, lx, deltas, N)
        upd = m > best
        best = np.where(upd, m, best)
        who = [fam if u else w for u, w in zip(upd, who)]
    ld = -np.log(deltas)
    win = ld >= ld.max() - trend_decades * np.log(10.0)
    slope = float(np.polyfit(ld[win], np.log(best[win]), 1)[0]) if win.sum() >= 2 else float("nan")
    notes = [f"deltas below 1/N = {1.0 / N:.3g} use a fractional top sample"]
    return ModulusCurve(deltas, best, who, slope, seed=seed, paths=N, notes=notes)
