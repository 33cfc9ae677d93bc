import numpy as np
import pytest

from dsmin import AngleRegion, ArrayConfig, build_moments

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ref_mm():
    """64-element array, d = 0.45, 85-95 degree region."""
    return build_moments(AngleRegion.from_degrees(85, 95), ArrayConfig(64, 0.45))


@pytest.fixture(scope="session")
def sel_mm():
    """16-element array, d = 0.45, 30-60 degree region."""
    return build_moments(AngleRegion.from_degrees(30, 60), ArrayConfig(16, 0.45))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_region(rng, lo=2.0, hi=178.0, min_width=1.0):
    while True:
        a, b = np.sort(rng.uniform(lo, hi, 2))
        if b - a >= min_width:
            return AngleRegion.from_degrees(a, b)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
