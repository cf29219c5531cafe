import numpy as np
import pytest

from bfcr import TrendConfig, build_bracing_set


@pytest.fixture(scope="session")
def bracing():
    """Default bracing set, shared across the whole run."""
    return build_bracing_set()


@pytest.fixture(scope="session")
def trend_config():
    return TrendConfig()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
