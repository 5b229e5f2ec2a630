import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from misspec import init_belief, posterior_mean, update_belief
from misspec.bayes import belief_from_weights, log_likelihood_avg, predictive_pmf
from misspec.errors import NoObservations, ZeroLikelihood
from misspec import load_environment

from conftest import bernoulli_doc

histories = st.lists(st.tuples(st.sampled_from(["x1", "x2"]), st.sampled_from([0, 1])), max_size=60)


def _direct_posterior(env, hist):
    # oracle: prior times the product of model likelihoods, normalized in linear space
    p = env.models.points[:, 0]
    w = np.ones_like(p)
    for _, y in hist:
        w = w * (p if y == 1 else 1 - p)
    return w / w.sum()


@given(histories)
def test_update_matches_direct_bayes(hist):
    env = load_environment(bernoulli_doc())
    b = init_belief(env.models)
    for a, y in hist:
        b = update_belief(env, b, a, y)
    np.testing.assert_allclose(b.weights, _direct_posterior(env, hist), rtol=1e-9, atol=1e-300)
    assert abs(np.exp(b.log_post).sum() - 1) < 1e-12
    np.testing.assert_allclose(b.log_post, b.recomputed_log_post(), atol=1e-9)


@given(histories)
def test_order_invariance(hist):
    env = load_environment(bernoulli_doc())
    b1 = b2 = init_belief(env.models)
    for a, y in hist:
        b1 = update_belief(env, b1, a, y)
    for a, y in reversed(hist):
        b2 = update_belief(env, b2, a, y)
    np.testing.assert_allclose(b1.log_post, b2.log_post, atol=1e-9)


def test_long_history_stays_finite(ex1):
    b = init_belief(ex1.models)
    for _ in range(20_000):
        b = update_belief(ex1, b, "x1", 1)
    assert np.all(np.isfinite(b.log_post[b.log_post > -np.inf]))
    assert posterior_mean(ex1, b)[0] == pytest.approx(0.99, abs=1e-6)


def test_zero_likelihood_raises():
    env = load_environment({
        "actions": ["a"],
        "truth": {"kind": "discrete", "support": [0, 1], "pmf": {"a": [0.5, 0.5]}},
        "payoff": {"table": {"a": [0.0, 0.0]}},
        "models": {"family_kind": "discrete_table", "grid": {"points": [0.0, 1.0]}, "prior": [1.0, 0.0],
                   "table": [{"a": [1.0, 0.0]}, {"a": [0.5, 0.5]}]},
    }, validate=False)
    with pytest.raises(ZeroLikelihood):
        update_belief(env, init_belief(env.models), "a", 1)


def test_average_loglik_needs_data(ex1):
    b = init_belief(ex1.models)
    with pytest.raises(NoObservations):
        log_likelihood_avg(b, 0)
    b = update_belief(ex1, b, "x1", 1)
    assert np.isfinite(log_likelihood_avg(b, 10))


def test_predictive_is_a_pmf(ex1):
    b = update_belief(ex1, init_belief(ex1.models), "x2", 0)
    q = predictive_pmf(ex1, b)
    np.testing.assert_allclose(q.sum(axis=1), 1.0)


def test_two_atom_closed_form():
    # all-success data on two atoms: posterior on the first is a logistic in t
    env = load_environment(bernoulli_doc() | {"models": {"family_kind": "bernoulli_common",
                                                         "grid": {"points": [0.6, 0.8]}, "prior": [0.3, 0.7]}})
    b = init_belief(env.models)
    for t in range(1, 41):
        b = update_belief(env, b, "x1", 1)
        want = 1.0 / (1.0 + (0.7 / 0.3) * np.exp(-t * (np.log(0.6) - np.log(0.8))))
        assert b.weights[0] == pytest.approx(want, abs=1e-10)


def test_average_loglik_zero_at_truth():
    env = load_environment({
        "actions": ["a"],
        "truth": {"kind": "discrete", "support": [0, 1], "pmf": {"a": [0.4, 0.6]}},
        "payoff": {"table": {"a": [0.0, 1.0]}},
        "models": {"family_kind": "bernoulli_common", "grid": {"points": [0.3, 0.6]}},
    })
    b = init_belief(env.models)
    for y in (1, 0, 0, 1, 1):
        b = update_belief(env, b, "a", y)
    assert log_likelihood_avg(b, 1) == 0.0
    assert log_likelihood_avg(b, 0) != 0.0


@given(histories)
def test_posterior_identity(hist):
    # exp(log_post) is proportional to prior * exp(-t * L_t)
    env = load_environment(bernoulli_doc())
    b = init_belief(env.models)
    for a, y in hist:
        b = update_belief(env, b, a, y)
    if b.t == 0:
        return
    L = np.array([log_likelihood_avg(b, g) for g in range(env.models.size)])
    lw = env.models.log_prior - b.t * L
    w = np.exp(lw - lw.max())
    np.testing.assert_allclose(b.weights, w / w.sum(), atol=1e-10)
