import pytest
from hypothesis import HealthCheck, settings

from zerocurv.hexagon import build_hexagon

settings.register_profile(
    "default", deadline=None, max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def hexagon():
    return build_hexagon()
