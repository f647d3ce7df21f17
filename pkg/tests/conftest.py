"""
Shared fixtures for the trainer test suites
"""

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
