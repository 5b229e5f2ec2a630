import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from misspec import PRESET_NAMES, preset, run_batch, run_learning
from misspec.errors import CoverageError, EmptyHistory, TooShort
from misspec.simulate import (
    action_frequency,
    apt_distance,
    interpolate,
    read_trajectory_csv,
    record_schedule,
    tau_of,
    tau_schedule,
)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_fast_engine_matches_reference(name):
    cfg = preset(name)
    env, pol = cfg.env(), cfg.policy_spec()
    a = run_learning(env, pol, 1500, seed=3, engine="fast")
    b = run_learning(env, pol, 1500, seed=3, engine="reference")
    assert np.array_equal(a.t, b.t)
    assert np.array_equal(a.action, b.action)
    np.testing.assert_array_equal(a.sigma, b.sigma)
    np.testing.assert_allclose(a.kl_gap, b.kl_gap, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(a.belief_mean, b.belief_mean, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("rule", ["lexicographic", "uniform", "sticky"])
def test_tie_rules_agree_across_engines(ex1, rule):
    a = run_learning(ex1, horizon=800, seed=1, tie_rule=rule, engine="fast")
    b = run_learning(ex1, horizon=800, seed=1, tie_rule=rule, engine="reference")
    assert np.array_equal(a.action, b.action)


def test_seeds_reproduce(ex1):
    a = run_learning(ex1, horizon=5000, seed=11, record_every=7)
    b = run_learning(ex1, horizon=5000, seed=11, record_every=7)
    c = run_learning(ex1, horizon=5000, seed=12, record_every=7)
    assert np.array_equal(a.sigma, b.sigma)
    assert not np.array_equal(a.sigma, c.sigma)


def test_batch_matches_single_runs(ex1):
    batch = run_batch(ex1, preset("negative-reinforcement").policy_spec(), 2000, [4, 2])
    assert [t.seed for t in batch] == [2, 4]
    single = run_learning(ex1, horizon=2000, seed=4)
    assert np.array_equal(batch[1].sigma, single.sigma)


def test_sigma_is_running_frequency(ex1):
    tr = run_learning(ex1, horizon=1000, seed=0)
    onehot = np.eye(2)[tr.action]
    np.testing.assert_allclose(tr.sigma, np.cumsum(onehot, axis=0) / tr.t[:, None], atol=1e-12)
    np.testing.assert_allclose(action_frequency([ex1.actions[a] for a in tr.action], ex1), tr.sigma[-1])
    with pytest.raises(EmptyHistory):
        action_frequency([], ex1)


def test_csv_round_trip(tmp_path, ex1, triangle):
    for env, pol in ((ex1, preset("negative-reinforcement").policy_spec()), triangle):
        tr = run_learning(env, pol, 1200, seed=5, record_every=50)
        path = tr.to_csv(tmp_path / "t.csv")
        back = read_trajectory_csv(path, env, tr.seed, tr.config_hash)
        assert np.array_equal(back.t, tr.t)
        assert np.array_equal(back.action, tr.action)
        np.testing.assert_array_equal(back.sigma, tr.sigma)
        np.testing.assert_array_equal(back.kl_gap, tr.kl_gap)
        np.testing.assert_array_equal(back.consequence, tr.consequence)


@given(st.integers(1, 5000))
def test_tau_is_harmonic(t):
    assert tau_of(t) == pytest.approx(sum(1.0 / k for k in range(1, t + 1)), rel=1e-12)


def test_schedules():
    s = record_schedule(5000, 1000)
    assert s[0] == 1 and s[-1] == 5000 and 1000 in s and 3000 in s
    ts = tau_schedule(100, 10_000, 0.1)
    assert ts[0] == 100 and ts[-1] <= 10_000
    assert np.all(np.diff(np.log(ts)) < 0.11)


def test_interpolation_hits_records(ex1):
    tr = run_learning(ex1, horizon=3000, seed=0, record_every=1)
    w = interpolate(tr)
    tau = tau_of(tr.t)
    np.testing.assert_allclose(w(tau[[10, 500, 2999]]), tr.sigma[[10, 500, 2999]], atol=1e-12)
    with pytest.raises(TooShort):
        interpolate(run_learning(ex1, horizon=1, seed=0))


def test_apt_distance_coverage(ex1):
    pol = preset("negative-reinforcement").policy_spec()
    tr = run_learning(ex1, pol, 2000, seed=0)
    assert apt_distance(tr, ex1, pol, 3.0, 1.0) >= 0.0
    with pytest.raises(CoverageError):
        apt_distance(tr, ex1, pol, 3.0, 50.0)


@pytest.mark.parametrize("engine", ["fast", "reference"])
def test_kl_gap_replays_offline(ex1, engine):
    from misspec.bayes import init_belief, update_belief
    from misspec.kld import weighted_kl_gap

    tr = run_learning(ex1, horizon=600, seed=2, engine=engine)
    b = init_belief(ex1.models)
    gaps = []
    for i in range(len(tr)):
        b = update_belief(ex1, b, ex1.actions[tr.action[i]], ex1.truth.support[tr.consequence[i]])
        gaps.append(weighted_kl_gap(ex1, tr.sigma[i], b))
    np.testing.assert_allclose(tr.kl_gap, gaps, rtol=1e-9, atol=1e-14)


def test_innovation_vanishes_without_ties(one_dim):
    env, pol = one_dim
    tr = run_learning(env, pol, 3000, seed=0)
    if tr.tie_events == 0:
        assert np.all(tr.innovation_mean() == 0)
    ex = preset("negative-reinforcement")
    tr = run_learning(ex.env(), ex.policy_spec(), 3000, seed=0, tie_rule="uniform")
    assert tr.tie_events > 0
    assert np.all(np.abs(tr.innovation_mean()) <= 1.0)
