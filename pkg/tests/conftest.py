import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# timing-based health checks are too twitchy on shared CI boxes
settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=(HealthCheck.too_slow,),
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
