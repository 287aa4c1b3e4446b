import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from hsvol.simplexgeom import valid_mask  # noqa: E402

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def random_valid_angles(rng, n):
    """``n`` valid angle systems, uniform on the valid part of (0, π)^6."""
    out = []
    have = 0
    while have < n:
        a = rng.uniform(0.0, math.pi, (max(4096, 25 * (n - have)), 6))
        a = a[valid_mask(a)]
        out.append(a)
        have += len(a)
    return np.concatenate(out)[:n]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
