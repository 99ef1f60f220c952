import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from micropolar import MaterialParams, TorusGrid

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def params():
    return MaterialParams(1.0, 1.0, 1.0)


@pytest.fixture
def params0():
    return MaterialParams(1.0, 1.0, 0.0)


@pytest.fixture
def grid():
    return TorusGrid(32, 2 * np.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# -- acceptance summary: one line per criterion at the end of the run ----------

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """``{criterion: [(passed, detail), ...]}`` shared by the acceptance tests."""
    return request.config.stash.setdefault(_ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_ACCEPTANCE, None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(log):
        parts = log[n]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {detail}")
