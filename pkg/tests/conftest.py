import sys

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("qhgeo", max_examples=60, deadline=None)
settings.load_profile("qhgeo")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion that ran, in criterion order
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
