import math

import mpmath
import numpy as np
import pytest

from zetagaps.zeta_engine import scan_zeros


@pytest.fixture(scope="session")
def zeros_to_100():
    return scan_zeros(10, 100)


@pytest.fixture(scope="session")
def first_zero():
    return float(mpmath.zetazero(1).imag)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


TWO_PI = 2 * math.pi


_VERDICTS = []


@pytest.fixture(scope="session")
def verdict():
    """Record one pass/fail line per acceptance criterion."""
    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {label}: {detail}"
        _VERDICTS.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
