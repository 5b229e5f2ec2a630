import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from misspec import PRESET_NAMES, preset
from misspec.cli import main, parse_seeds
from misspec.errors import SchemaError, UnknownPreset
from misspec.presets import config_from_document


@given(st.integers(0, 50), st.integers(0, 50))
def test_seed_ranges(a, b):
    lo, hi = min(a, b), max(a, b)
    assert parse_seeds(f"{lo}..{hi}") == list(range(lo, hi + 1))
    assert parse_seeds(f"{a},{b}") == [a, b]


def test_seed_errors():
    with pytest.raises(SchemaError):
        parse_seeds("5..2")
    with pytest.raises(SchemaError):
        parse_seeds(",")


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_presets_load(name):
    cfg = preset(name)
    env = cfg.env()
    cfg.policy_spec()
    assert env.n_actions == len(cfg.environment["actions"])
    again = config_from_document(json.loads(json.dumps(cfg.document())))
    assert again.document() == cfg.document()


def test_unknown_preset():
    with pytest.raises(UnknownPreset):
        preset("no-such")


def test_preset_override_document():
    cfg = config_from_document({"preset": "negative-reinforcement", "params": {"horizon": 10}})
    assert cfg.param("horizon") == 10 and cfg.param("record_every") == 100


def test_simulate_writes_outputs(tmp_path, capsys):
    rc = main(["simulate", "--preset", "negative-reinforcement", "--seeds", "0..1", "--horizon", "2000",
               "--out", str(tmp_path)])
    assert rc == 0
    names = {p.name for p in tmp_path.iterdir()}
    assert {"trajectory_seed0.csv", "trajectory_seed1.csv", "manifest.json"} <= names
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["command"] == "simulate" and man["seeds"] == [0, 1]
    assert len(man["config_hash"]) == 16 and "numpy" in man["versions"]


def test_di_and_equilibria_commands(tmp_path):
    assert main(["di", "--preset", "negative-reinforcement", "--out", str(tmp_path / "d")]) == 0
    events = json.loads((tmp_path / "d" / "events.json").read_text())
    assert events and all("events" in e for e in events)
    assert main(["equilibria", "--preset", "triangle", "--out", str(tmp_path / "e")]) == 0
    doc = json.loads((tmp_path / "e" / "equilibria.json").read_text())
    assert len(doc["equilibria"]) == 1 and doc["limit_cycle"]["closed"]


def test_classify_command(tmp_path):
    assert main(["classify", "--preset", "positively-reinforcing", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "classification.json").read_text())
    assert [m["verdict"] for m in doc["models"]] == ["AttractingModel", "RepellingModel", "AttractingModel"]


def test_config_file(tmp_path):
    cfg = preset("one-dimensional").document()
    cfg["params"]["horizon"] = 500
    cfg["params"]["seeds"] = [3]
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert main(["simulate", "--config", str(path), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "trajectory_seed3.csv").exists()


def test_errors_are_structured(tmp_path, capsys):
    assert main(["simulate", "--preset", "no-such"]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "UnknownPreset"
    (tmp_path / "bad.json").write_text(json.dumps({"nothing": 1}))
    assert main(["simulate", "--config", str(tmp_path / "bad.json")]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "SchemaError"
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 2
