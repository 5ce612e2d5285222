"""Shared fixtures for the simulator test suite."""

import numpy as np
import pytest
from loguru import logger

from config.simulation_config import SimConfig


@pytest.fixture
def rng():
    """Seeded generator for test-local randomness."""
    return np.random.default_rng(20240101)


@pytest.fixture
def small_config():
    """A short sweep on n=64 that still exercises both nulling and CP limits."""
    return SimConfig.build(
        n=64,
        d_grid=[8, 16],
        snr_grid_db=[0.0, 10.0],
        trials="4",
        master_seed=7,
    )


@pytest.fixture(autouse=True)
def _quiet_logger():
    """Drop sinks installed by entry points so later tests do not write to closed streams."""
    yield
    logger.remove()

