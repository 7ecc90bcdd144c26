import cmath
import math
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from koenigs import parse

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

STRIP_H = "(i/pi)*log((1+z)/(1-z)) + 1/2"
CAYLEY_H = "(1+z)/(1-z)"
PLANE_H = "i*((1+z)/(1-z))^2"


@pytest.fixture(scope="session")
def strip_h():
    return parse(STRIP_H)


@pytest.fixture(scope="session")
def cayley_h():
    return parse(CAYLEY_H)


@pytest.fixture(scope="session")
def plane_h():
    return parse(PLANE_H)


@st.composite
def disc_points(draw, r_max=0.95):
    r = draw(st.floats(0, r_max))
    theta = draw(st.floats(0, 2 * math.pi))
    return r * cmath.exp(1j * theta)


@st.composite
def boundary_points(draw):
    return cmath.exp(1j * draw(st.floats(0, 2 * math.pi)))


# Koenigs functions with their model kind and Denjoy-Wolff point; the
# equality flag marks the Mobius family a (sigma + z) / (sigma - z) + c
KOENIGS_EXAMPLES = [
    (STRIP_H, "strip", 1, False),
    (CAYLEY_H, "right", 1, True),
    (PLANE_H, "plane", 1, False),
    ("3*(1+z)/(1-z) + 2*i", "right", 1, True),
    ("-(1+z)/(1-z)", "left", 1, True),
    ("(i+z)/(i-z)", "right", 1j, True),
    ("(i/2)*log((1+z)/(1-z))", "strip", 1, False),
    ("(i/pi)*log((1+z)/(1-z)) + 0.8", "strip", 1, False),
    ("(1+z)/(1-z) + i*log((1+z)/(1-z))", "right", 1, False),
]


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
