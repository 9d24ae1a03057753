import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import norm

from prequential import (
    Decision,
    GaussianPredictive,
    ProcessModel,
    SeriesTooShortError,
    classify,
    cumulative_delta,
    delta_hyv_step,
    delta_log_step,
    hyvarinen_fd_oracle,
    hyvarinen_score,
    log_score,
    make_rng,
    simulate_series,
)
from prequential.scoring import gaussian_log_density

N01 = GaussianPredictive(0.0, 1.0)
N04 = GaussianPredictive(0.0, 4.0)

# Frozen from independent oracles:
#   -scipy.stats.norm.logpdf(1, 0, 2)                        = 1.737085713764618
#   -logpdf(1, 0, 2) + logpdf(1, 0, 1)                       = 0.3181471805599454
#   FD oracle (h=1e-4, 50 digits) at x=1 of N(0,4) minus N(0,1) = 0.5625
LOG_SCORE_1_N04 = 1.737085713764618
DELTA_LOG_1 = 0.3181471805599454
DELTA_HYV_1 = 0.5625


def scipy_log_score(x, pred):
    return -norm.logpdf(x, pred.mean, math.sqrt(pred.variance))


def fd_score(x, pred, h=1e-4):
    return hyvarinen_fd_oracle(x, gaussian_log_density(pred.mean, pred.variance), h)


# -- log score ---------------------------------------------------------------


def test_log_score_at_mode():
    assert log_score(0.0, N01) == pytest.approx(0.5 * math.log(2 * math.pi), abs=1e-15)
    assert log_score(0.0, N01) == pytest.approx(0.9189385, abs=1e-7)
    pred = GaussianPredictive(3.0, 2.5)
    assert log_score(3.0, pred) == pytest.approx(0.5 * math.log(2 * math.pi * 2.5), abs=1e-15)


def test_log_score_matches_density_oracle():
    assert scipy_log_score(1.0, N04) == pytest.approx(LOG_SCORE_1_N04, abs=1e-14)
    assert log_score(1.0, N04) == pytest.approx(LOG_SCORE_1_N04, abs=1e-12)


@given(st.floats(-50, 50), st.floats(-5, 5), st.floats(0.01, 100))
def test_log_score_against_scipy(x, mu, var):
    pred = GaussianPredictive(mu, var)
    assert log_score(x, pred) == pytest.approx(scipy_log_score(x, pred), rel=1e-12, abs=1e-12)


@given(st.floats(-5, 5), st.floats(0.01, 100), st.floats(-10, 10))
def test_log_score_minimised_at_mean(mu, var, dx):
    pred = GaussianPredictive(mu, var)
    assert log_score(mu + dx, pred) >= log_score(mu, pred)


# -- Hyvarinen score ---------------------------------------------------------


def test_hyvarinen_examples():
    assert hyvarinen_score(0.0, N01) == -2.0
    assert hyvarinen_score(1.5, GaussianPredictive(1.5, 0.25)) == -8.0
    assert hyvarinen_score(1.0, N04) == -0.4375


def test_fd_oracle_examples():
    assert fd_score(0.0, N01) == pytest.approx(-2.0, abs=1e-6)
    assert fd_score(1.0, N04) == pytest.approx(-0.4375, abs=1e-6)
    pred = GaussianPredictive(0.1, 2.5)
    assert fd_score(0.3, pred) == pytest.approx(hyvarinen_score(0.3, pred), abs=1e-6)


def test_fd_oracle_float_mode_on_benign_input():
    f = lambda t: -0.5 * math.log(2 * math.pi) - 0.5 * t * t
    assert hyvarinen_fd_oracle(0.7, f, 1e-4, dps=None) == pytest.approx(-2 + 0.49, abs=1e-6)


def test_fd_oracle_generic_log_density():
    # non-Gaussian: f = -x^4 / 4 -> 2 f'' + f'^2 = -6 x^2 + x^6
    f = lambda t: -(t**4) / 4
    assert hyvarinen_fd_oracle(1.3, f) == pytest.approx(-6 * 1.3**2 + 1.3**6, abs=1e-6)


def test_fd_oracle_rejects_bad_step():
    with pytest.raises(ValueError):
        hyvarinen_fd_oracle(0.0, gaussian_log_density(0, 1), 0.0)


def test_gaussian_log_density_matches_scipy():
    f = gaussian_log_density(0.4, 3.0)
    assert float(f(1.7)) == pytest.approx(norm.logpdf(1.7, 0.4, math.sqrt(3.0)), abs=1e-14)
    with mpmath.workdps(40):
        assert isinstance(f(mpmath.mpf(1)), mpmath.mpf)


@settings(max_examples=300, deadline=None)
@given(st.floats(-20, 20), st.floats(-5, 5), st.floats(0.01, 100))
def test_hyvarinen_matches_fd_oracle(x, mu, var):
    pred = GaussianPredictive(mu, var)
    assert hyvarinen_score(x, pred) == pytest.approx(fd_score(x, pred), abs=1e-6)


# -- per-step deltas ---------------------------------------------------------


def test_delta_examples():
    assert delta_log_step(0.4, N04, N04) == 0.0
    assert delta_hyv_step(0.4, N04, N04) == 0.0
    assert delta_log_step(1.0, N01, N04) == pytest.approx(DELTA_LOG_1, abs=1e-12)
    assert delta_hyv_step(1.0, N01, N04) == pytest.approx(DELTA_HYV_1, abs=1e-12)
    fd = fd_score(1.0, N04) - fd_score(1.0, N01)
    assert fd == pytest.approx(DELTA_HYV_1, abs=1e-6)
    oracle_log = scipy_log_score(1.0, N04) - scipy_log_score(1.0, N01)
    assert oracle_log == pytest.approx(DELTA_LOG_1, abs=1e-14)


def test_delta_matches_displayed_formulas():
    x, p, q = 0.8, GaussianPredictive(0.3, 1.7), GaussianPredictive(-0.2, 0.6)
    paper_log = 0.5 * (
        math.log(q.variance) - math.log(p.variance)
        + (x - q.mean) ** 2 / q.variance - (x - p.mean) ** 2 / p.variance
    )
    paper_hyv = (
        2 / p.variance - 2 / q.variance
        + (x - q.mean) ** 2 / q.variance**2 - (x - p.mean) ** 2 / p.variance**2
    )
    assert delta_log_step(x, p, q) == pytest.approx(paper_log, abs=1e-13)
    assert delta_hyv_step(x, p, q) == pytest.approx(paper_hyv, abs=1e-13)


@given(st.floats(-10, 10), st.floats(-5, 5), st.floats(-5, 5), st.floats(0.01, 100))
def test_equal_variance_step_relation(x, mp, mq, var):
    p, q = GaussianPredictive(mp, var), GaussianPredictive(mq, var)
    dl = delta_log_step(x, p, q)
    assert dl == pytest.approx(0.5 * ((x - mq) ** 2 - (x - mp) ** 2) / var, rel=1e-9, abs=1e-9)
    assert delta_hyv_step(x, p, q) == pytest.approx(2 / var * dl, rel=1e-9, abs=1e-9)


def test_score_difference_consistency(rng):
    n = 10_000
    x = rng.uniform(-20, 20, n)
    mp, mq = rng.uniform(-5, 5, (2, n))
    vp, vq = 10 ** rng.uniform(-2, 2, (2, n))
    worst_log = worst_hyv = 0.0
    for i in range(n):
        p, q = GaussianPredictive(mp[i], vp[i]), GaussianPredictive(mq[i], vq[i])
        worst_log = max(
            worst_log, abs(delta_log_step(x[i], p, q) - (log_score(x[i], q) - log_score(x[i], p)))
        )
        worst_hyv = max(
            worst_hyv,
            abs(delta_hyv_step(x[i], p, q) - (hyvarinen_score(x[i], q) - hyvarinen_score(x[i], p))),
        )
    assert worst_log < 1e-10
    assert worst_hyv < 1e-10


# -- cumulative --------------------------------------------------------------

P_IID = ProcessModel(0.0, 0.0, 1.0)
Q_IID = ProcessModel(0.0, 0.0, 4.0)
P_PAPER = ProcessModel(0.0, 0.5, 1.0)
Q_PAPER = ProcessModel(0.0, 0.1, 4.0)


def test_cumulative_single_step():
    path = cumulative_delta([0.0, 1.0], P_IID, Q_IID)
    assert len(path) == 1
    assert path.cumulative_log == pytest.approx(DELTA_LOG_1, abs=1e-12)
    assert path.cumulative_hyv == pytest.approx(DELTA_HYV_1, abs=1e-12)


def test_cumulative_identical_models_is_zero():
    x = simulate_series(P_PAPER, 101, make_rng(2))
    path = cumulative_delta(x, P_PAPER, P_PAPER)
    assert path.cumulative_log == 0.0 and path.cumulative_hyv == 0.0
    assert not path.per_step_log.any() and not path.per_step_hyv.any()


def test_cumulative_matches_scalar_steps():
    x = simulate_series(P_PAPER, 101, make_rng(5))
    path = cumulative_delta(x, P_PAPER, Q_PAPER)
    assert path.per_step_log.shape == (100,) and path.per_step_hyv.shape == (100,)
    for i in range(1, 101):
        from prequential import conditional_predictive as cp

        pp, pq = cp(P_PAPER, x[i - 1]), cp(Q_PAPER, x[i - 1])
        assert path.per_step_log[i - 1] == pytest.approx(delta_log_step(x[i], pp, pq), abs=1e-12)
        assert path.per_step_hyv[i - 1] == pytest.approx(delta_hyv_step(x[i], pp, pq), abs=1e-12)
    assert path.cumulative_log == pytest.approx(path.per_step_log.sum(), rel=1e-9)
    assert path.cumulative_hyv == pytest.approx(path.per_step_hyv.sum(), rel=1e-9)


def test_cumulative_too_short():
    with pytest.raises(SeriesTooShortError):
        cumulative_delta([1.0], P_IID, Q_IID)
    with pytest.raises(SeriesTooShortError):
        cumulative_delta([], P_IID, Q_IID)


@pytest.mark.parametrize("k", [2, 10, 50, 100])
def test_prequential_additivity(k):
    x = simulate_series(P_PAPER, 101, make_rng(9))
    full = cumulative_delta(x, P_PAPER, Q_PAPER)
    head = cumulative_delta(x[:k], P_PAPER, Q_PAPER)
    tail_log = full.per_step_log[k - 1 :].sum()
    tail_hyv = full.per_step_hyv[k - 1 :].sum()
    assert full.cumulative_log == pytest.approx(head.cumulative_log + tail_log, abs=1e-9)
    assert full.cumulative_hyv == pytest.approx(head.cumulative_hyv + tail_hyv, abs=1e-9)


def test_paper_config_clean_data_identifies_p():
    for rep in range(100):
        x = simulate_series(P_PAPER, 101, make_rng(1, rep))
        path = cumulative_delta(x, P_PAPER, Q_PAPER)
        assert path.cumulative_log > 0 and path.cumulative_hyv > 0


# -- scaling law -------------------------------------------------------------


@pytest.mark.parametrize("c", [0.1, 3.0, 10.0])
def test_scaling_law(c):
    x = simulate_series(P_PAPER, 101, make_rng(12))
    p2 = ProcessModel(c * 0.3, 0.5, c * c * 1.0)
    q2 = ProcessModel(c * -0.2, 0.1, c * c * 4.0)
    p1 = ProcessModel(0.3, 0.5, 1.0)
    q1 = ProcessModel(-0.2, 0.1, 4.0)
    base = cumulative_delta(x, p1, q1)
    scaled = cumulative_delta(c * x, p2, q2)
    np.testing.assert_allclose(scaled.per_step_log, base.per_step_log, rtol=1e-9, atol=0)
    np.testing.assert_allclose(scaled.per_step_hyv, base.per_step_hyv / c**2, rtol=1e-9, atol=0)
    assert classify(scaled.cumulative_log) == classify(base.cumulative_log)
    assert classify(scaled.cumulative_hyv) == classify(base.cumulative_hyv)


# -- classify ----------------------------------------------------------------


@pytest.mark.parametrize(
    "value, cutoff, expected",
    [
        (0.5, 0.0, Decision.SELECT_P),
        (-3.2, 0.0, Decision.SELECT_Q),
        (0.0, 0.0, Decision.TIE),
        (1.0, 2.0, Decision.SELECT_Q),
        (2.0, 2.0, Decision.TIE),
    ],
)
def test_classify(value, cutoff, expected):
    assert classify(value, cutoff) is expected


def test_decision_wire_values():
    assert [d.value for d in Decision] == ["P", "Q", "TIE"]
