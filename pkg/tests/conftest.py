import cmath
import math

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("qsum", deadline=None, derandomize=True, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qsum")


def polar(rmin, rmax, amin=-math.pi, amax=math.pi):
    """Complex numbers with modulus in ``[rmin, rmax]`` and argument in ``[amin, amax]``."""
    return st.builds(cmath.rect, st.floats(rmin, rmax), st.floats(amin, amax))


@pytest.fixture
def close():
    def check(a, b, rtol=1e-12, atol=0.0):
        assert abs(complex(a) - complex(b)) <= atol + rtol * abs(complex(b)), (a, b)
    return check


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion."""
    def emit(number, title, ok, detail):
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
