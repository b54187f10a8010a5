"""
Pytest configuration and shared fixtures
"""
import pytest
import sys
import os

import numpy as np

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from omegacurves import create_app
from omegacurves.curve import Affine
from omegacurves.utils.linalg import random_orthonormal


@pytest.fixture(scope='session')
def app():
    """Create application for testing"""
    app = create_app('testing')

    with app.app_context():
        yield app


@pytest.fixture
def runner(app):
    """Create test CLI runner"""
    return app.test_cli_runner()


@pytest.fixture
def rng():
    """Fresh generator with a fixed seed for each test"""
    return np.random.default_rng(20240607)


@pytest.fixture
def linear_isometry(rng):
    """Linear isometric embedding R^2 -> R^4 (no offset)"""
    return Affine(random_orthonormal(rng, 4, 2), isometric=True, name='linear-isometry')
