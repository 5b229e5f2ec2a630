import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from misspec import BranchSample, Filippov, FixedSelection, Myopic, di_rhs, integrate_di, integrate_perturbed_di
from misspec.errors import StepTooLarge
from misspec.inclusion import hull_distance, read_dipath_csv, segment, stencil_directions, stencil_points

from misspec import preset

simplex3 = st.lists(st.floats(0.01, 1), min_size=3, max_size=3).map(lambda v: np.array(v) / sum(v))


@given(simplex3, st.integers(0, 2), st.floats(0, 3), st.floats(0, 3))
def test_segment_is_a_flow(s, x, a, b):
    np.testing.assert_allclose(segment(segment(s, x, a), x, b), segment(s, x, a + b), atol=1e-12)
    assert abs(segment(s, x, a).sum() - 1) < 1e-12


@given(simplex3)
def test_hull_distance_of_full_face_is_zero(s):
    assert hull_distance(s, np.ones(3, bool)) < 1e-12
    assert hull_distance(s, np.array([True, False, False])) == pytest.approx(np.linalg.norm(s - [1, 0, 0]))


def test_stencil_geometry():
    d = stencil_directions(3)
    assert d.shape == (12, 3)
    np.testing.assert_allclose(np.linalg.norm(d, axis=1), 1.0)
    np.testing.assert_allclose(d.sum(axis=1), 0.0, atol=1e-15)
    pts = stencil_points(np.array([0.5, 0.5, 0.0]), 0.1)
    assert np.all(pts >= 0) and np.allclose(pts.sum(axis=1), 1)


def test_rhs_at_tie_has_both_velocities(ex1):
    r = di_rhs(ex1, Myopic(), [0.5, 0.5])
    assert r.actions == ("x1", "x2")
    assert r.contains_zero()
    r = di_rhs(ex1, Myopic(), [0.9, 0.1])
    assert r.actions == ("x2",) and not r.contains_zero()


def test_ex1_exact_segment_and_slide(ex1):
    (p,) = integrate_di(ex1, Myopic(), [1.0, 0.0], 5.0, 1e-3)
    t = p.times[p.times <= math.log(2)]
    np.testing.assert_allclose(p.at(t)[:, 0], np.exp(-t), atol=1e-12)
    late = p.times[p.times >= math.log(2)]
    assert np.max(np.abs(p.at(late)[:, 0] - 0.5)) < 1e-9
    # the switch sits where payoffs differ by the tie tolerance, a hair past ln 2
    assert p.events[0].time == pytest.approx(math.log(2), abs=1e-8)


def test_step_halving_changes_nothing_on_exact_segments(ex1):
    (a,) = integrate_di(ex1, Myopic(), [0.9, 0.1], 4.0, 1e-2)
    (b,) = integrate_di(ex1, Myopic(), [0.9, 0.1], 4.0, 5e-3)
    grid = np.linspace(0, 4, 41)
    np.testing.assert_allclose(a.at(grid), b.at(grid), atol=1e-8)


def test_zero_perturbation_is_bit_identical(triangle):
    env, pol = triangle
    s0 = [0.5, 0.3, 0.2]
    (a,) = integrate_di(env, pol, s0, 3.0, 1e-2)
    (b,) = integrate_perturbed_di(env, pol, s0, 3.0, 1e-2, 0.0)
    assert np.array_equal(a.times, b.times) and np.array_equal(a.states, b.states)


def test_perturbation_only_enlarges_action_sets(triangle):
    env, pol = triangle
    (p,) = integrate_perturbed_di(env, pol, [0.5, 0.3, 0.2], 2.0, 1e-2, 0.05)
    assert np.all(p.states >= -1e-12) and np.allclose(p.states.sum(axis=1), 1)


def test_branch_bundle(triangle):
    env, pol = triangle
    paths = integrate_di(env, pol, [0.34, 0.33, 0.33], 2.0, 1e-2, BranchSample(8, 1))
    assert len(paths) == 8
    again = integrate_di(env, pol, [0.34, 0.33, 0.33], 2.0, 1e-2, BranchSample(8, 1))
    for p, q in zip(paths, again):
        assert np.array_equal(p.states, q.states)


def test_fixed_selection_priority(ex1):
    (p,) = integrate_di(ex1, Myopic(), [0.5, 0.5], 1.0, 1e-2, FixedSelection(("x2", "x1")))
    assert p.selection[1] in ("x2", "slide", "rest")
    (q,) = integrate_di(ex1, Myopic(), [0.5, 0.5], 1.0, 1e-2, FixedSelection(stationary=True))
    np.testing.assert_allclose(q.final, [0.5, 0.5], atol=1e-9)


def test_event_cap():
    cfg = preset("robust-counterexample-base")
    env, pol = cfg.env(), cfg.policy_spec()
    with pytest.raises(StepTooLarge):
        integrate_di(env, pol, [2 / 3, 0, 1 / 3], 3.0, 1e-2, FixedSelection(("x2", "x1", "x3")), max_events=5)


def test_csv_round_trip(tmp_path, triangle):
    env, pol = triangle
    (p,) = integrate_di(env, pol, [0.6, 0.3, 0.1], 2.0, 1e-2, Filippov())
    back = read_dipath_csv(p.to_csv(tmp_path / "p.csv"), env.actions)
    assert np.array_equal(back.times, p.times) and np.array_equal(back.states, p.states)
    assert back.selection == p.selection and len(back.events) == len(p.events)


def test_perturbed_ex1_stays_in_band(ex1):
    eps = 0.02
    for p in integrate_perturbed_di(ex1, Myopic(), [0.95, 0.05], 10.0, 1e-2, eps, BranchSample(2, 0)):
        assert abs(p.final[0] - 0.5) <= eps + 1e-9


def test_perturbed_triangle_leaves_centre(triangle):
    env, pol = triangle
    s0 = np.array([0.34, 0.33, 0.33])
    for p in integrate_perturbed_di(env, pol, s0, 10.0, 1e-2, 0.01, BranchSample(3, 0)):
        assert np.max(np.linalg.norm(p.states - 1 / 3, axis=1)) > 0.05


def test_table_policy_event_times_are_analytic(one_dim):
    # from (0, 1) the model is theta = sigma(x1) = 1 > 2/3, so x0 is played and
    # theta = e^-t crosses the breakpoint 2/3 at t = ln 1.5
    env, pol = one_dim
    (p,) = integrate_di(env, pol, [0.0, 1.0], 3.0, 1e-2, FixedSelection())
    assert p.events[0].time == pytest.approx(math.log(1.5), abs=1e-8)
