import numpy as np
import pytest

from ballconvex import make_ball, make_ellipsoid


@pytest.fixture
def disk():
    return make_ball([0.0, 0.0], 1.0)


@pytest.fixture
def ellipse21():
    return make_ellipsoid([2.0, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_directions(rng, count, dim):
    g = rng.standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


ACCEPTANCE_LINES = []


def record_acceptance(number, title, passed, detail):
    line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES, key=lambda t: t[0]):
            terminalreporter.write_line(line)
