import numpy as np
import pytest

from centroaffine import build_grid, make_ellipsoid, make_fourier

# one line per acceptance criterion, printed at the end of the session
CRITERIA = {}


def record(number, passed, detail=""):
    CRITERIA[number] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA, key=lambda k: (int(str(k).rstrip("abcdefgh")), str(k))):
        ok, detail = CRITERIA[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def circle256():
    return build_grid(2, 256)


@pytest.fixture(scope="session")
def circle512():
    return build_grid(2, 512)


@pytest.fixture(scope="session")
def sphere():
    return build_grid(3, (48, 96))


@pytest.fixture(scope="session")
def ellipse():
    return make_ellipsoid([2.0, 1.0])


@pytest.fixture(scope="session")
def trefoil():
    """1 + 0.05 cos(3 theta), the standard non-ellipse."""
    return make_fourier(1.0, [(3, 0.05, 0.0)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
