import numpy as np
import pytest
from hypothesis import settings

# wall-clock deadlines are noise here: the suite also runs multi-second timing checks
settings.register_profile("default", deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record():
    """Collect one pass/fail line per acceptance criterion."""

    def _record(criterion, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_mask(rng, h, w, density=0.4):
    return rng.random((h, w)) < density
