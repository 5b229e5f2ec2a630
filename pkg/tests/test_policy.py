import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from misspec import Myopic, Table1D, load_environment, select_action, solve_bellman
from misspec.bayes import belief_from_weights, init_belief
from misspec.errors import EmptyActionSet, SchemaError, UnsupportedSize
from misspec.policy import (
    StickyPrevious,
    UniformRandom,
    actions_at_model,
    bellman_actions,
    cyclic_shift,
    load_policy,
    model_action_masks,
    myopic_actions,
    policy_document,
)

from conftest import bernoulli_doc


def two_model_env(payoff=None):
    doc = bernoulli_doc()
    doc["models"]["grid"] = {"points": [0.3, 0.7]}
    if payoff:
        doc["payoff"] = {"table": payoff}
    return load_environment(doc)


def test_myopic_ex1_switches_at_half(ex1):
    # x1 pays when y = 0 and x2 when y = 1, so x1 is optimal iff the rate of y = 1 is below 1/2
    assert actions_at_model(ex1, Myopic(), 0.3) == ("x1",)
    assert actions_at_model(ex1, Myopic(), 0.7) == ("x2",)
    assert actions_at_model(ex1, Myopic(), 0.5) == ("x1", "x2")


def test_myopic_uniform_prior_is_tie(ex1):
    assert myopic_actions(ex1, init_belief(ex1.models)) == ("x1", "x2")


def test_table1d_breakpoints():
    env = load_environment({
        "actions": ["x0", "x1"],
        "truth": {"kind": "gaussian", "dim": 1, "means": {"x0": [0.0], "x1": [1.0]}},
        "payoff": {"affine": {"x0": [0.0, 0.0], "x1": [0.0, 0.0]}},
        "models": {"family_kind": "gaussian_common_mean", "grid": {"lo": 0, "hi": 1, "n": 11}},
    })
    pol = Table1D((0.5,), (("x0",), ("x1",)))
    m = model_action_masks(env, pol, np.array([[0.2], [0.5], [0.8]]))
    assert m.tolist() == [[True, False], [True, True], [False, True]]


def test_cyclic_shift_beats_previous(triangle):
    env, pol = triangle
    assert pol.name == "cyclic_shift"
    # against a model concentrated on x1 the table answers with the action that wins against it
    acts = [actions_at_model(env, pol, e) for e in np.eye(3)]
    assert all(len(a) == 1 for a in acts)
    assert len({a[0] for a in acts}) == 3


@given(st.lists(st.sampled_from(["a", "b", "c"]), min_size=1, max_size=3, unique=True), st.floats(0, 0.999999))
def test_selection_returns_member(s, u):
    s = tuple(s)
    assert select_action(s) == s[0]
    assert select_action(s, UniformRandom(), u=u) in s
    assert select_action(s, StickyPrevious(s[-1])) == s[-1]


def test_uniform_selection_is_uniform():
    rng = np.random.default_rng(3)
    picks = [select_action(("a", "b", "c"), UniformRandom(), rng) for _ in range(30_000)]
    freq = np.array([picks.count(k) for k in "abc"]) / len(picks)
    assert np.all(np.abs(freq - 1 / 3) < 0.015)


def test_selection_errors():
    with pytest.raises(EmptyActionSet):
        select_action(())
    with pytest.raises(SchemaError):
        select_action(("a",), "coin-flip")


def test_policy_document_round_trip(triangle):
    _, pol = triangle
    again = load_policy(policy_document(pol), ["x1", "x2", "x3"])
    assert policy_document(again) == policy_document(pol)


def test_bellman_myopic_at_zero_discount(rng):
    env = two_model_env()
    vf = solve_bellman(env, 0.0, resolution=40)
    for _ in range(50):
        w = rng.dirichlet([1, 1])
        b = belief_from_weights(w)
        assert set(bellman_actions(env, vf, b)) == set(myopic_actions(env, b))


def test_bellman_constant_payoffs():
    env = two_model_env({"x1": [1.0, 1.0], "x2": [0.5, 0.5]})
    vf = solve_bellman(env, 0.9, resolution=20, tol=1e-10)
    np.testing.assert_allclose(vf.values, 10.0, atol=1e-8)


def test_bellman_rejects_large_grids(ex1):
    with pytest.raises(UnsupportedSize):
        solve_bellman(ex1, 0.5)
