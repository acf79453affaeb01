import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from airdemand.data import make_split, synthesize

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def noiseless():
    """42 synthetic quarters, exact linear target."""
    ds, truth = synthesize(42, seed=7, noise_sd=0.0)
    return ds, truth, make_split(42, seed=7)


@pytest.fixture(scope="session")
def noisy():
    ds, truth = synthesize(42, seed=3, noise_sd=40.0)
    return ds, truth, make_split(42, seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
