import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from orlicz_lab.measure_ops import SampledRealFunction
from orlicz_lab.mc_sim import (CopySpec, _top_delta_norms, ball_directions, bootstrap_weights,
                               coefficient_corpus, empirical_luxemburg, equicontinuity_modulus,
                               js_check, sample_copies)
from orlicz_lab.orlicz_core import Power, Spliced

SIGNS = CopySpec.identical(SampledRealFunction.constant(1.0), 6)


def test_same_seed_same_paths_and_different_seed_differs():
    a = sample_copies(SIGNS, 1000, 7).data
    assert np.array_equal(a, sample_copies(SIGNS, 1000, 7).data)
    assert not np.array_equal(a, sample_copies(SIGNS, 1000, 8).data)


def test_paths_do_not_depend_on_thread_count(monkeypatch):
    spec = CopySpec.identical(SampledRealFunction.power_log(0.4), 5)
    N = 3 * (1 << 16) + 17
    monkeypatch.setenv("ORLICZ_LAB_THREADS", "1")
    one = sample_copies(spec, N, 3).data
    monkeypatch.setenv("ORLICZ_LAB_THREADS", "4")
    assert np.array_equal(one, sample_copies(spec, N, 3).data)


def test_prefix_of_a_longer_run_is_the_shorter_run():
    assert np.array_equal(sample_copies(SIGNS, 70_000, 1).data[:5000],
                          sample_copies(SIGNS, 5000, 1).data)


@pytest.mark.parametrize("r", [0.2, 0.5, 0.9])
def test_power_copies_have_the_right_law(r):
    # |X| = U^{-r}, so |X|^{-1/r} is uniform on (0, 1]
    x = sample_copies(CopySpec.identical(SampledRealFunction.power_log(r), 3), 20_000, 2).data
    for j in range(3):
        assert stats.kstest(np.abs(x[:, j]) ** (-1 / r), "uniform").pvalue > 1e-3
    assert abs(np.mean(np.sign(x))) < 4 / np.sqrt(x.size)


def test_two_valued_copies_hit_high_with_the_right_frequency():
    spec = CopySpec.counterexample(6)
    N = 200_000
    x = np.abs(sample_copies(spec, N, 4).data)
    for j in range(6):
        m = spec.mass[j]
        freq = np.mean(x[:, j] == spec.high[j])
        assert abs(freq - m) <= 5 * np.sqrt(m * (1 - m) / N)
        assert np.all((x[:, j] == spec.high[j]) | (x[:, j] == spec.low[j]))


def test_bad_path_count():
    with pytest.raises(ValueError):
        sample_copies(SIGNS, 0, 0)


@settings(max_examples=20)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6).filter(lambda a: np.any(np.abs(a) > 1e-3)),
       st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_empirical_power_norm_is_the_sample_moment(a, p):
    batch = sample_copies(CopySpec.identical(SampledRealFunction.power_log(0.2), 6), 4000, 5)
    S = batch.data[:, :len(a)] @ np.asarray(a)
    e = empirical_luxemburg(Power(p), a, batch, B=0, clamp=False)
    assert e.value == pytest.approx(np.mean(np.abs(S) ** p) ** (1 / p), rel=1e-9)


def test_random_sign_norm_within_standard_errors():
    batch = sample_copies(SIGNS, 50_000, 6)
    for a in ([1.0], [3.0, -1.0, 2.0], np.ones(6)):
        e = empirical_luxemburg(Power(2.0), a, batch)
        assert e.se > 0 or len(a) == 1
        assert abs(e.value - np.linalg.norm(a)) <= 4 * e.se + 1e-12


def test_bootstrap_weights_are_poisson_one():
    W = bootstrap_weights(10_000, B=20, boot_seed=1)
    assert W.shape == (20, 10_000)
    assert abs(W.mean() - 1) < 0.01 and abs(W.var() - 1) < 0.02
    assert np.array_equal(W, bootstrap_weights(10_000, B=20, boot_seed=1))


@given(st.lists(st.floats(-10, 10), min_size=5, max_size=200).filter(
    lambda v: np.any(np.abs(v) > 1e-3)))
def test_fast_power_path_matches_root_solver(v):
    x = np.abs(np.asarray(v))
    x = x[x > 0]
    lx = np.sort(np.log(x))[::-1]
    N = lx.size + 3
    deltas = np.array([1.0, 0.5, 0.13, 1.5 / N])
    fast = _top_delta_norms(Power(1.7), lx, deltas, N)
    slow = _top_delta_norms(Spliced(Power(1.7), Power(1.7), 1.0), lx, deltas, N)
    assert np.allclose(fast, slow, rtol=1e-8)


def test_corpus_and_ball_shapes():
    corpus = coefficient_corpus(12, 16, 0)
    assert len(corpus) == 12
    assert all(np.array_equal(a, b) for a, b in zip(corpus, coefficient_corpus(12, 16, 0)))
    assert np.all(corpus[0] == 1) and corpus[4].size == 2
    dirs, fams = ball_directions(8, 5, 0)
    assert len(dirs) == 3 * 5 + 8
    assert fams.count("basis") == 8 and all(d.size == 8 for d in dirs)


def test_modulus_is_monotone_and_bounded_by_one():
    curve = equicontinuity_modulus(Power(2.0), None, SIGNS, 2.0 ** -np.arange(0, 10),
                                   ball_sample_size=4, N=1 << 14, seed=1)
    m = curve.modulus
    assert m[0] == pytest.approx(1.0) and np.all(np.diff(m) <= 1e-12)
    assert curve.label == "sampled lower envelope"


def test_js_check_in_l2_with_random_signs():
    corpus = coefficient_corpus(8, 6, 2)
    rep = js_check(Power(2.0), SampledRealFunction.constant(1.0), corpus, N=20_000, seed=0, B=20)
    # ||a||_2 <= disjoint-sum norm <= 2 ||a||_2 and the sample norm estimates ||a||_2
    assert rep.band <= 2.2 and rep.se.shape == (8,)
