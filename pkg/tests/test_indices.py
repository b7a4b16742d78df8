import numpy as np
import pytest
from hypothesis import given, strategies as st

from orlicz_lab.indices import dilation_quantities, index_at_infinity, index_at_zero
from orlicz_lab.orlicz_core import Power, PowerLog, Spliced, Tabulated


@given(st.floats(1.05, 4.0))
def test_power_indices_are_exact(p):
    for est in (*index_at_zero(Power(p)), *index_at_infinity(Power(p))):
        assert est.point == pytest.approx(p, abs=1e-9)
        assert est.rigorous_bound == pytest.approx(p, abs=1e-9)
        assert not est.degenerate


@pytest.mark.parametrize("lo,hi", [(1.3, 2.5), (2.5, 1.3), (1.1, 3.0)])
def test_splice_separates_the_two_ends(lo, hi):
    s = Spliced(Power(lo), Power(hi), 1.0)
    a0, b0 = index_at_zero(s)
    ai, bi = index_at_infinity(s)
    assert a0.point == pytest.approx(lo, abs=1e-6) and b0.point == pytest.approx(lo, abs=1e-6)
    assert ai.point == pytest.approx(hi, abs=1e-6) and bi.point == pytest.approx(hi, abs=1e-6)


@pytest.mark.parametrize("spec,regime", [
    (PowerLog(1.5, 0.45).normalized(), "zero"),
    (PowerLog(1.5, -2.0, "infinity", float(np.exp(4))).normalized(), "infinity"),
    (PowerLog(2.2, 1.0, "infinity", float(np.exp(2))).normalized(), "infinity"),
], ids=["log-at-zero", "neg-log-at-infinity", "pos-log-at-infinity"])
def test_slowly_varying_factor_does_not_move_the_index(spec, regime):
    p = spec.p if hasattr(spec, "p") else spec.base.p
    ests = index_at_zero(spec) if regime == "zero" else index_at_infinity(spec)
    for est in ests:
        assert est.point == pytest.approx(p, abs=0.01)
        assert abs(est.point - p) <= max(est.uncertainty, 1e-3) * 10


@given(st.floats(-5.0, 5.0), st.floats(1.1, 3.0))
def test_indices_ignore_a_constant_factor(log_c, p):
    y = np.linspace(-30, 30, 601)
    T = Tabulated(y, p * y + log_c, lo_exp=p, hi_exp=p)
    assert index_at_zero(T)[0].point == pytest.approx(p, abs=1e-6)
    assert index_at_infinity(T)[1].point == pytest.approx(p, abs=1e-6)


def test_dilation_quantities_order_and_monotonicity():
    # these hold on any finite t-window (unlike submultiplicativity, which needs the whole ray)
    spec = Spliced(Power(1.4), PowerLog(2.0, -1.0, "infinity", float(np.exp(3))), 1.0).normalized()
    for regime in ("zero", "infinity"):
        ls, dplus, dminus, _ = dilation_quantities(spec, regime, n_dyadic=12)
        assert np.all(dminus <= dplus)
        grow = np.diff(dplus) * np.sign(ls[1])
        assert np.all(grow >= -1e-12)


def test_bad_regime_rejected():
    with pytest.raises(ValueError):
        dilation_quantities(Power(2.0), "middle")
