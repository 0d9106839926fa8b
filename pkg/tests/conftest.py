import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from muskat.spectral_curve import PeriodicCurve, alpha_grid

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


def band_limited(n, modes, amp, rng):
    """Random real samples with Fourier content in ``1 <= |k| <= modes``."""
    a = alpha_grid(n)
    k = np.arange(1, modes + 1)
    ca = rng.standard_normal(modes) * amp / k**2
    cb = rng.standard_normal(modes) * amp / k**2
    return np.cos(np.outer(a, k)) @ ca + np.sin(np.outer(a, k)) @ cb


def random_curve(n=64, modes=6, amp=0.05, seed=0):
    rng = np.random.default_rng(seed)
    return PeriodicCurve(band_limited(n, modes, amp, rng), band_limited(n, modes, amp, rng))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
