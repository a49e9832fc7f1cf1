import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qrlsim.agent import AgentConfig, run_agent
from qrlsim.environment import OneWinnerEnvironment
from qrlsim.ensemble import (
    LearningTimeWarning,
    QSchedule,
    average_reward_curve,
    coherence_limits,
    learning_time,
    predict_classical_time,
    predict_quantum_time,
    q_schedule,
    run_ensemble,
    unbounded_quantum_time,
)


def test_default_schedule():
    s = q_schedule(100, 2.0, 0.37)
    assert s.J == 29
    assert s.q[0] == pytest.approx(0.01) and s.q[-1] == pytest.approx(57 / 156)


def test_classical_predictor_exact_sum():
    s = q_schedule(100, 2.0, 0.37)
    exact = math.fsum((98 + 2 * j) / (2 * j - 1) for j in range(1, 30))
    assert predict_classical_time(s) == pytest.approx(exact, abs=1e-9)
    assert predict_classical_time(s) == pytest.approx(292.877, abs=1e-3)


def test_quantum_predictor_examples():
    assert predict_quantum_time(QSchedule((0.25,))) == pytest.approx(2.0, abs=1e-12)
    assert predict_quantum_time(QSchedule((0.01,))) == pytest.approx(2 / 0.087616, abs=1e-9)
    with pytest.warns(LearningTimeWarning):
        t = predict_quantum_time(q_schedule(100, 2.0, 0.37))
    assert t == pytest.approx(96.287, abs=1e-3)


def test_no_warning_inside_validity():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        predict_quantum_time(QSchedule((0.01, 0.2)), n=1)


def test_predictors_reject_zero():
    for f in (predict_classical_time, predict_quantum_time):
        with pytest.raises(ValueError):
            f(QSchedule((0.0,)))
    with pytest.raises(ValueError):
        unbounded_quantum_time(QSchedule((0.0, 0.1)))


def test_coherence_limits():
    assert coherence_limits(1).q_reachable == pytest.approx(0.25, abs=1e-15)
    assert coherence_limits(5).approx_factor == pytest.approx(1 / 20)
    with pytest.raises(ValueError):
        coherence_limits(0)


@settings(max_examples=50)
@given(st.lists(st.floats(1e-4, 1.0), min_size=1, max_size=60), st.floats(0.1, 3.0))
def test_cauchy_schwarz_property(q, alpha):
    res = unbounded_quantum_time(QSchedule(tuple(q)), alpha)
    assert res.time <= res.bound * (1 + 1e-12)


def test_fresh_classical_first_epoch(ensembles):
    c = average_reward_curve(ensembles["classical"])
    assert abs(c.mean[0] - 0.01) < 3 * c.stderr[0]


def test_fresh_hybrid_first_round(ensembles):
    c = average_reward_curve(ensembles["hybrid"])
    assert c.mean[0] == c.mean[1]
    assert abs(c.mean[0] - 0.087616 / 2) < 3 * c.stderr[0]


def test_quantum_only_drop(ensembles):
    c = average_reward_curve(ensembles["quantum_only"])
    peak = int(np.nanargmax(c.mean))
    assert peak < len(c.mean) - 1
    assert np.nanmean(c.mean[-50:]) < c.mean[peak]


def test_undistributed_curve_sums_match(ensembles):
    st_ = ensembles["hybrid"]
    a = average_reward_curve(st_, True)
    b = average_reward_curve(st_, False)
    assert abs(np.nansum(a.mean * a.counts) - np.nansum(b.mean * b.counts)) < 1e-6
    assert np.all(b.mean[0::2][:10] == 0)  # grover epochs book nothing


def test_learning_time_matches_per_agent_replay():
    env = OneWinnerEnvironment(100, 0)
    cfg = AgentConfig("hybrid", max_epochs=400)
    st_ = run_ensemble(cfg, env, 40, master_seed=8)
    for i in range(40):
        led = run_agent(cfg, env, np.random.SeedSequence(8, spawn_key=(i,)))
        rew = led.reward_epochs
        want = int(rew[28]) + 1 if len(rew) >= 29 else -1
        assert st_.learning_times[i] == want


def test_learning_time_warns_above_switch(ensembles):
    with pytest.warns(LearningTimeWarning):
        learning_time(ensembles["classical"], 0.5)


def test_learning_time_zero_rewards_needed():
    st_ = run_ensemble(AgentConfig("classical", max_epochs=10), OneWinnerEnvironment(2, 0), 5)
    assert np.all(st_.learning_times == 0)
    with pytest.warns(LearningTimeWarning):
        assert learning_time(st_, 0.5).mean == 0


@pytest.mark.parametrize("workers", [1, 3])
def test_determinism_across_workers(workers):
    env = OneWinnerEnvironment(100, 0)
    cfg = AgentConfig("hybrid", max_epochs=300)
    a = run_ensemble(cfg, env, 700, master_seed=3, workers=1)
    b = run_ensemble(cfg, env, 700, master_seed=3, workers=workers)
    assert a.eta_sum.tobytes() == b.eta_sum.tobytes()
    assert a.eta_sumsq.tobytes() == b.eta_sumsq.tobytes()
    assert np.array_equal(a.learning_times, b.learning_times)


def test_single_agent_stderr_zero():
    st_ = run_ensemble(AgentConfig("classical", max_epochs=20), OneWinnerEnvironment(5, 0), 1)
    c = average_reward_curve(st_)
    assert np.all(c.stderr == 0)
    with pytest.raises(ValueError):
        run_ensemble(AgentConfig(), OneWinnerEnvironment(5, 0), 0)
