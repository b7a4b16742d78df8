import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orlicz_lab.criteria import (dilation_condition, g_function, inverse_reciprocal,
                                 lemma3dop_bound, main4_hypothesis, majorization_check,
                                 membership_probe, power_log_search_family, prop2a_condition,
                                 strongly_embedded_verdict, submultiplicative_check,
                                 vallee_poussin_majorant)
from orlicz_lab.exceptions import PreconditionError
from orlicz_lab.measure_ops import SampledRealFunction
from orlicz_lab.orlicz_core import Power, PowerLog

T = np.logspace(-9, -0.01, 60)


@pytest.mark.parametrize("p,r", [(1.5, 0.3), (2.0, 0.1), (1.2, 0.7)])
def test_dilation_condition_for_pure_power_is_flat(p, r):
    # ||sigma_n t^-r||_p / ||sigma_n t^-r||_1 = (1 - r)(1 - rp)^{-1/p} for every n
    rep = dilation_condition(Power(p), SampledRealFunction.power_log(r), 2.0 ** np.arange(8))
    assert np.allclose(rep.lhs / rep.rhs, (1 - r) * (1 - r * p) ** (-1 / p), rtol=1e-7)
    assert rep.verdict == "equivalent" and rep.holds


def test_inverse_reciprocal_of_power():
    assert np.allclose(inverse_reciprocal(Power(1.5))(T), T ** (-1 / 1.5), rtol=1e-12)


@pytest.mark.parametrize("p", [1.2, 1.5, 1.9])
def test_g_function_of_power(p):
    g, _ = g_function(Power(p))
    assert np.allclose(g(T), T ** (-1 / p), rtol=1e-3)


@pytest.mark.parametrize("p", [1.2, 1.5, 2.0])
def test_submultiplicative_power(p):
    cert = submultiplicative_check(Power(p))
    assert cert.holds and cert.C == pytest.approx(1.0)


def test_negative_log_factor_is_not_submultiplicative():
    assert not submultiplicative_check(PowerLog(1.5, -1.0).normalized()).holds


def test_majorization_is_tight_for_powers():
    # (c (x) t^{-1/p})* = ||c||_p t^{-1/p} = ||c||_psi g exactly
    rng = np.random.default_rng(1)
    res = majorization_check(Power(1.5), [rng.standard_normal(k) for k in (1, 3, 9)])
    assert res.violations == 0 and abs(res.worst_excess) < 1e-3


def test_distribution_inequality_for_power():
    res = lemma3dop_bound(Power(1.5))
    assert res.holds and res.worst_deficit < 1e-3


@pytest.mark.parametrize("r,p", [(0.3, 1.5), (0.2, 3.0)])
def test_main4_hypothesis_for_power(r, p):
    out = main4_hypothesis(Power(p), SampledRealFunction.power_log(r))
    assert out["norm"] == pytest.approx((1 / (1 - r * p)) ** (1 / p), rel=1e-4)


@settings(max_examples=25)
@given(p=st.floats(1.1, 3.0), d=st.floats(0.05, 1.0), above=st.booleans())
def test_membership_of_power_functions(p, d, above):
    beta = p + d if above else p - d * (p - 1) / 2
    assert membership_probe(Power(p), beta).in_LM == ("yes" if above else "no")


def test_membership_decided_by_the_log_factor():
    shift = float(np.exp(4))
    assert membership_probe(PowerLog(1.5, -2.0, "infinity", shift), 1.5).in_LM == "yes"
    assert membership_probe(PowerLog(1.5, 0.5, "infinity", shift), 1.5).in_LM == "no"
    with pytest.raises(PreconditionError):
        membership_probe(Power(2.0), 0.0)


def test_vallee_poussin_majorant_structure():
    f = SampledRealFunction.power_log(1 / 1.5, -1.0)
    maj = vallee_poussin_majorant(Power(1.5), f)
    w = maj.weights
    assert np.all(w >= 1) and np.all(w[1:] <= 2 * w[:-1] + 1e-12)
    assert np.all(np.diff(w) >= 0)
    assert maj.ratio_growth > 1 and np.isfinite(maj.modular)
    assert np.isfinite(maj.delta2_infinity)


def test_majorant_rejects_function_outside_class():
    with pytest.raises(PreconditionError):
        vallee_poussin_majorant(Power(2.0), SampledRealFunction.power_log(0.5))


def test_search_family_grows_faster_than_m():
    M = Power(1.5)
    for _, N in power_log_search_family(M):
        y = np.array([0.0, 20.0, 60.0])
        assert np.all(np.diff(N.logeval(y) - M.logeval(y)) > 0)


def test_prop2a_with_n_equal_m_is_flat_and_flags_precondition():
    f = SampledRealFunction.power_log(0.3)
    rep = prop2a_condition(Power(1.5), Power(1.5), f, 2.0 ** np.arange(6))
    assert rep.band == pytest.approx(1.0) and rep.notes


def test_verdict_by_index_gap():
    # psi ~ u^2 at zero while M = u^1.5: the index gap alone decides
    v = strongly_embedded_verdict(Power(1.5), SampledRealFunction.power_log(0.3))
    assert v.index_gap == pytest.approx(0.5, abs=0.02)
    assert (v.strongly_embedded, v.equicontinuous) == ("yes", "yes")
    routes = [e["route"] for e in v.evidence if "route" in e]
    assert routes == ["index gap clears its uncertainty"] * 2
