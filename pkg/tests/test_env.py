import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from misspec import environment_document, load_environment, project_to_simplex, simplex_grid
from misspec.env import (
    as_action_dist,
    make_streams,
    normals_from_uniforms,
    project_rows_to_simplex,
    read_document,
    validate_environment,
)
from misspec.errors import SchemaError, ValidationError

from conftest import bernoulli_doc

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


@given(arrays(float, st.integers(1, 6), elements=finite))
def test_projection_lands_on_simplex(v):
    p = project_to_simplex(v)
    assert np.all(p >= 0)
    assert abs(p.sum() - 1) < 1e-12


@given(arrays(float, st.integers(1, 6), elements=finite))
def test_projection_is_idempotent(v):
    p = project_to_simplex(v)
    np.testing.assert_allclose(project_to_simplex(p), p, atol=1e-12)


@given(arrays(float, st.integers(2, 5), elements=finite), st.integers(0, 10 ** 6))
def test_projection_is_nearest_point(v, seed):
    # no random simplex point is closer than the projection
    p = project_to_simplex(v)
    q = np.random.default_rng(seed).dirichlet(np.ones(v.shape[0]), size=50)
    assert np.all(np.linalg.norm(q - v, axis=1) >= np.linalg.norm(p - v) - 1e-9)


@given(arrays(float, (4, 3), elements=finite))
def test_row_projection_matches_single(v):
    rows = project_rows_to_simplex(v)
    for r, out in zip(v, rows):
        np.testing.assert_allclose(out, project_to_simplex(r), atol=1e-12)


def test_simplex_grid_counts():
    g = simplex_grid(3, 4)
    assert g.shape == (15, 3)
    np.testing.assert_allclose(g.sum(axis=1), 1.0)
    assert len({tuple(np.round(r * 4).astype(int)) for r in g}) == 15


def test_action_dist_rejects_bad_vectors():
    with pytest.raises(ValueError):
        as_action_dist([0.5, 0.6])
    with pytest.raises(ValueError):
        as_action_dist([1.2, -0.2])
    with pytest.raises(ValueError):
        as_action_dist([1.0, 0.0], 3)


def test_streams_are_reproducible_and_independent():
    a1, b1 = make_streams(7)
    a2, b2 = make_streams(7)
    assert np.array_equal(a1.random(5), a2.random(5))
    assert np.array_equal(b1.random(5), b2.random(5))
    c, d = make_streams(7)
    assert not np.array_equal(c.random(5), d.random(5))


def test_box_muller_moments():
    u = np.random.default_rng(0).random(200_000)
    z = normals_from_uniforms(u)
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1) < 0.01


def test_document_round_trip(ex1):
    doc = environment_document(ex1)
    again = load_environment(json.loads(json.dumps(doc)))
    assert environment_document(again) == doc


def test_read_json_and_toml(tmp_path):
    doc = bernoulli_doc()
    (tmp_path / "e.json").write_text(json.dumps(doc))
    (tmp_path / "e.toml").write_text(
        'actions = ["x1", "x2"]\n'
        '[truth]\nkind = "discrete"\nsupport = [0, 1]\n'
        '[truth.pmf]\nx1 = [0.25, 0.75]\nx2 = [0.75, 0.25]\n'
        '[payoff.table]\nx1 = [1.0, 0.0]\nx2 = [0.0, 1.0]\n'
        '[models]\nfamily_kind = "bernoulli_common"\nprior = "uniform"\n'
        '[models.grid]\nlo = 0.01\nhi = 0.99\nn = 99\n')
    a = load_environment(read_document(tmp_path / "e.json"))
    b = load_environment(read_document(tmp_path / "e.toml"))
    assert environment_document(a) == environment_document(b)


def test_schema_errors():
    doc = bernoulli_doc()
    del doc["truth"]
    with pytest.raises(SchemaError):
        load_environment(doc)
    doc = bernoulli_doc()
    doc["models"]["family_kind"] = "mystery"
    with pytest.raises(SchemaError):
        load_environment(doc)


def test_validation_flags_bad_pmf():
    doc = bernoulli_doc()
    doc["truth"]["pmf"]["x1"] = [0.5, 0.6]
    with pytest.raises(ValidationError):
        load_environment(doc)
    report = validate_environment(load_environment(bernoulli_doc()))
    assert report.ok
