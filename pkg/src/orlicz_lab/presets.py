"""Named parameter sets for the worked examples and the simulation scenarios."""

from dataclasses import dataclass, field

import numpy as np

from .measure_ops import SampledRealFunction
from .mc_sim import CopySpec
from .orlicz_core import Power, PowerLog

# A shift of e^4 keeps u^p ln^-2(shift + u) convex on [0, inf) for p = 1.5.
EXAMPLE2_SHIFT = float(np.exp(4.0))


@dataclass
class Preset:
    name: str
    M: object
    f: SampledRealFunction = None
    copies: CopySpec = None
    params: dict = field(default_factory=dict)


def example1(p=1.5):
    """M(u) = u^p and f(t) = t^{-1/p} ln^{-3/(2p)}(e/t): not strongly embedded."""
    if not 1 < p < 2:
        raise ValueError("example1 needs 1 < p < 2")
    f = SampledRealFunction.power_log(1.0 / p, -1.5 / p)
    return Preset("example1", Power(p), f, params={"p": p})


def example2(p=1.5, alpha=0.3, shift=EXAMPLE2_SHIFT):
    """M(u) ~ u^p ln^-2 u at infinity and f(t) = t^{-1/p} ln^alpha(e/t): strongly embedded."""
    if not 1 < p < 2 or not 0 < alpha < 1.0 / p:
        raise ValueError("example2 needs 1 < p < 2 and 0 < alpha < 1/p")
    M = PowerLog(p, -2.0, "infinity", shift).normalized()
    f = SampledRealFunction.power_log(1.0 / p, alpha)
    return Preset("example2", M, f, params={"p": p, "alpha": alpha, "shift": shift})


def l2_theorem(p=1.5, alpha=0.3):
    """Example 2's f placed in L^2 (M = u^2)."""
    base = example2(p, alpha)
    return Preset("l2-theorem", Power(2.0), base.f, params=dict(base.params))


def counterexample(count=20):
    """Two-valued independent functions whose unit ball is not equicontinuous in L^2."""
    return Preset("counterexample", Power(2.0), None, CopySpec.counterexample(count),
                  params={"count": count})


def rademacher(count=16):
    """Random signs: f = 1, so empirical L^2 norms equal the l^2 norm of the coefficients."""
    f = SampledRealFunction.constant(1.0)
    return Preset("rademacher", Power(2.0), f, CopySpec.identical(f, count), {"count": count})


PRESETS = {
    "example1": example1,
    "example2": example2,
    "l2-theorem": l2_theorem,
    "counterexample": counterexample,
    "rademacher": rademacher,
}


def get(name, **overrides):
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return factory(**overrides)
