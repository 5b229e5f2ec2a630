import numpy as np
import pytest
from hypothesis import settings

from misspec import load_environment, preset

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def bernoulli_doc(lo=0.01, hi=0.99, n=99):
    return {
        "actions": ["x1", "x2"],
        "truth": {"kind": "discrete", "support": [0, 1], "pmf": {"x1": [0.25, 0.75], "x2": [0.75, 0.25]}},
        "payoff": {"table": {"x1": [1.0, 0.0], "x2": [0.0, 1.0]}},
        "models": {"family_kind": "bernoulli_common", "grid": {"lo": lo, "hi": hi, "n": n}, "prior": "uniform"},
    }


@pytest.fixture(scope="session")
def ex1():
    """Two actions whose success rates mirror each other; myopic play is self-defeating."""
    return preset("negative-reinforcement").env()


@pytest.fixture(scope="session")
def ex1_fine():
    return load_environment(bernoulli_doc(0.0005, 0.9995, 2001))


@pytest.fixture(scope="session")
def triangle():
    cfg = preset("triangle")
    return cfg.env(), cfg.policy_spec()


@pytest.fixture(scope="session")
def one_dim():
    cfg = preset("one-dimensional")
    return cfg.env(), cfg.policy_spec()


@pytest.fixture(scope="session")
def reinforcing():
    cfg = preset("positively-reinforcing")
    return cfg.env(), cfg.policy_spec()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
