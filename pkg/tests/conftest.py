import math
import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from conekernel.geometry import ConeUnion

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def quarter_cone():
    """Single double cone around e1 with aperture pi/4 (d = 2)."""
    return ConeUnion.from_specs([((1.0, 0.0), math.pi / 4)])


@pytest.fixture
def full_plane():
    """Two orthogonal half-plane pairs, covering the circle up to a null set."""
    return ConeUnion.from_specs([((1.0, 0.0), math.pi / 2), ((0.0, 1.0), math.pi / 2)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Record one line per acceptance criterion, printed in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def log(number: int, name: str, passed: bool, measured, threshold, runtime: float):
        lines.append((number, f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {name}: "
                              f"measured={measured} threshold={threshold} runtime={runtime:.1f}s"))
    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
