import math

import mpmath
import pytest

from rabi_bloch.model import ModelParams


def series_j(n, x, dps=50):
    """Independent oracle: the ascending power series of J_n evaluated in high precision."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        sign = 1
        if n < 0:
            n, sign = -n, (-1) ** n
        half = x / 2
        total = mpmath.mpf(0)
        term = half**n / mpmath.factorial(n)
        k = 0
        while True:
            total += term
            k += 1
            term *= -(half**2) / (k * (k + n))
            if abs(term) < mpmath.mpf(10) ** (-dps + 5) and k > half:
                break
        return sign * float(total)


def bisect_zero(f, lo, hi, tol=1e-13):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.fixture
def fig2_params():
    return ModelParams.from_L(28.89, n_bar=1.01e4, alpha=0.1, omega_atom=1.0)


@pytest.fixture
def small_params():
    """A narrow run that keeps propagation tests fast."""
    return ModelParams.from_L(6.0, n_bar=1.0e4, alpha=0.3, omega_atom=1.0)


TWO_PI = 2.0 * math.pi


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
