import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gnpvlc.channel import ReceiverChannel
from gnpvlc.gnp import EVE_RANGES, BOB_RANGES, sample_responses

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_receiver(rng, n_tx=4, n_paths=5, ranges=EVE_RANGES, los_boost=1.0):
    """Synthetic receiver: random gains and phases, plate responses from ``ranges``."""
    gains = rng.uniform(0.0, 1e-6, size=(n_tx, n_paths))
    gains[:, 0] *= los_boost
    phases = rng.uniform(0, 2 * np.pi, size=(n_tx, n_paths))
    return ReceiverChannel(gains, phases, sample_responses(ranges, rng, (n_tx, n_paths)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["bob", "eve"])
def ranges(request):
    return BOB_RANGES if request.param == "bob" else EVE_RANGES


# acceptance report -------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
