import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from flexcross import flexion, samples

settings.register_profile(
    "default",
    max_examples=15,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile(
    "thorough",
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

KINDS = ("euclidean", "spherical", "hyperbolic")


def family_for(kind: str, n: int, seed: int, products=None):
    """Random admissible family; deterministic in (kind, n, seed)."""
    rng = np.random.default_rng([seed, n, KINDS.index(kind)])
    data = samples.random_data(kind, n, rng, products=products)
    return flexion.build(data)


@pytest.fixture
def identity_data():
    """Spherical G = I, lambda = (1, 2, 4), s = -1, s' = +1."""
    return samples.identity_data(3, lam=[1.0, 2.0, 4.0])


@pytest.fixture
def identity_family(identity_data):
    return flexion.build(identity_data)
