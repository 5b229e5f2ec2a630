import json

import numpy as np
import pytest

from misspec import (
    CandidateSet,
    Myopic,
    berk_nash_residual,
    best_response_cycle,
    build_staircase,
    check_weak_identification,
    classify_model,
    equilibrium_models,
    equilibrium_residual,
    find_equilibria,
    load_environment,
    preset,
)
from misspec import test_attracting as certify_attracting
from misspec import test_repelling as certify_repelling
from misspec import test_robust_attracting as certify_robust
from misspec.equilibrium import sample_ball
from misspec.errors import MissingBasin, MonotonicityViolation, NotAnEquilibrium
from misspec.policy import cyclic_shift_coef


def test_ex1_equilibrium(ex1):
    (c,) = find_equilibria(ex1, Myopic(), 30)
    np.testing.assert_allclose(c.point, [0.5, 0.5], atol=1e-9)
    assert not c.is_continuum
    assert equilibrium_residual(ex1, Myopic(), [0.5, 0.5]) == 0.0
    assert equilibrium_residual(ex1, Myopic(), [0.8, 0.2]) > 0.1


def test_triangle_centre(triangle):
    env, pol = triangle
    (c,) = find_equilibria(env, pol, 30)
    np.testing.assert_allclose(c.point, [1 / 3] * 3, atol=1e-9)


def test_redundant_action_continuum():
    cfg = preset("redundant-action")
    comps = find_equilibria(cfg.env(), cfg.policy_spec(), 24)
    (c,) = [c for c in comps if c.is_continuum]
    pts = np.asarray(c.points)
    np.testing.assert_allclose(pts[:, :2], 1 / 3, atol=1e-9)
    np.testing.assert_allclose(pts[:, 2] + pts[:, 3], 1 / 3, atol=1e-9)
    assert len(pts) == 9


def test_shapley_triangle():
    cyc = best_response_cycle(cyclic_shift_coef(1.0, 2.0))
    assert cyc.closed and cyc.vertices.shape == (3, 3)
    for v in cyc.vertices:
        np.testing.assert_allclose(np.sort(v), [1 / 7, 2 / 7, 4 / 7], atol=1e-9)


def test_candidate_distance():
    c = CandidateSet([[1, 0, 0], [0, 1, 0]])
    assert c.distance([[0.5, 0.5, 0]])[0] == pytest.approx(0.0)
    assert c.distance([[0, 0, 1]])[0] == pytest.approx(np.sqrt(1.5))
    with pytest.raises(ValueError):
        CandidateSet([[np.nan, 0.5, 0.5]])


def test_ball_samples_stay_in_simplex(rng):
    base = np.array([0.6, 0.3, 0.1])
    for _ in range(200):
        s = sample_ball(rng, base, 0.2)
        assert np.all(s >= 0) and abs(s.sum() - 1) < 1e-12
        assert np.linalg.norm(s - base) <= 0.2 + 1e-12


def test_attracting_and_robust(ex1, tmp_path):
    cert = certify_attracting(ex1, Myopic(), [[0.5, 0.5]], U_radius=0.4, eps=0.05, T=5, n_init=6, n_branch=2)
    assert cert.verdict == "Attracting"
    rob = certify_robust(ex1, Myopic(), [[0.5, 0.5]], zeta=0.05, eps=0.02, T=5, samples=4, basin=cert)
    assert rob.verdict == "RobustlyAttracting"
    with pytest.raises(MissingBasin):
        certify_robust(ex1, Myopic(), [[0.5, 0.5]], zeta=0.05, eps=0.02)
    doc = json.loads(cert.write(tmp_path / "c.json").read_text())
    assert doc["verdict"] == "Attracting" and len(doc["evidence"]) == 6


def test_repelling_centre(triangle):
    env, pol = triangle
    cert = certify_repelling(env, pol, [1 / 3] * 3, n_sigma=3, n_branch=3)
    assert cert.verdict == "Repelling"
    with pytest.raises(NotAnEquilibrium):
        certify_repelling(env, pol, [0.5, 0.3, 0.2])


def test_one_dimensional_staircase(one_dim):
    env, pol = one_dim
    np.testing.assert_allclose(equilibrium_models(env, pol), [0, 1 / 3, 2 / 3], atol=1e-9)
    assert classify_model(env, pol, 0.0) == "AttractingModel"
    assert classify_model(env, pol, 1 / 3) == "RepellingModel"
    assert classify_model(env, pol, 2 / 3) == "AttractingModel"
    with pytest.raises(MonotonicityViolation):
        build_staircase(env, pol)


def test_reinforcing_staircase(reinforcing):
    env, pol = reinforcing
    st = build_staircase(env, pol)
    assert st.monotone
    got = [(round(f.theta, 9), f.case) for f in st.fixed_points]
    assert got == [(0.3, 3), (0.6, 2), (0.8, 3)]
    assert st.B(0.1) == (0.25, 0.25)
    assert st.B(0.6)[0] == pytest.approx(0.4) and st.B(0.6)[1] == pytest.approx(0.8)


def test_weak_identification():
    env = load_environment({
        "actions": ["a", "b"],
        "truth": {"kind": "discrete", "support": [0, 1], "pmf": {"a": [0.5, 0.5], "b": [0.5, 0.5]}},
        "payoff": {"table": {"a": [1.0, 0.0], "b": [0.0, 1.0]}},
        "models": {"family_kind": "discrete_table", "grid": {"points": [0.0, 1.0]}, "prior": "uniform",
                   "table": [{"a": [0.3, 0.7], "b": [0.5, 0.5]}, {"a": [0.7, 0.3], "b": [0.5, 0.5]}]},
    })
    # both models fit action a equally badly but predict it differently
    res = check_weak_identification(env, [1.0, 0.0])
    assert not res.identified and res.witness["action"] == "a"
    # playing only b, both models tie and predict b identically
    assert check_weak_identification(env, [0.0, 1.0]).identified


def test_berk_nash(ex1):
    assert berk_nash_residual(ex1, [0.5, 0.5]) <= 1e-12
    assert berk_nash_residual(ex1, [0.9, 0.1]) > 0.1
