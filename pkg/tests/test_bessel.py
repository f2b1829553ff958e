import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rabi_bloch.bessel import (
    MAX_ARGUMENT,
    MAX_ORDER,
    bessel_j,
    bessel_j_orders,
    bessel_j_sequence,
    j0_zero,
)
from rabi_bloch.exceptions import BesselDomainError

from conftest import bisect_zero, series_j


def test_values_at_origin():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert bessel_j(-3, 0.0) == 0.0


@pytest.mark.parametrize("x", [1e-4, 0.3, 1.0, 2.404825557695773, 5.0, 14.445, 28.89, 60.0,
                               100.0, 128.0])
@pytest.mark.parametrize("n", [0, 1, 2, 7, 20, 45, 100])
def test_against_power_series(n, x):
    assert abs(bessel_j(n, x) - series_j(n, x, dps=80)) <= 1e-12


def test_first_zero_from_series():
    assert abs(bessel_j(0, 2.404825557695773)) < 1e-10


@pytest.mark.parametrize("x", [1.0, 5.0, 14.45, 28.89, 60.0])
def test_normalization_identity(x):
    seq = bessel_j_sequence(200, x)
    assert abs(seq[0] ** 2 + 2.0 * np.sum(seq[1:] ** 2) - 1.0) <= 1e-10


@given(n=st.integers(1, 150), x=st.floats(0.05, 120.0))
@settings(max_examples=200, deadline=None)
def test_recurrence(n, x):
    lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x)
    assert abs(lhs - 2.0 * n / x * bessel_j(n, x)) <= 1e-10 * max(1.0, 2.0 * n / x)


@given(n=st.integers(0, MAX_ORDER), x=st.floats(0.0, MAX_ARGUMENT))
@settings(max_examples=200, deadline=None)
def test_reflection_is_exact(n, x):
    assert bessel_j(-n, x) == (-1) ** n * bessel_j(n, x)


@given(n=st.integers(-MAX_ORDER, MAX_ORDER), x=st.floats(0.0, MAX_ARGUMENT))
@settings(max_examples=200, deadline=None)
def test_bounded_by_one(n, x):
    assert abs(bessel_j(n, x)) <= 1.0


def test_orders_vectorized_matches_scalar():
    orders = np.arange(-30, 31)
    values = bessel_j_orders(orders, 14.445)
    np.testing.assert_allclose(values, [bessel_j(int(k), 14.445) for k in orders],
                               rtol=0, atol=1e-15)


@pytest.mark.parametrize("n, x", [(MAX_ORDER + 1, 1.0), (-MAX_ORDER - 1, 1.0), (0, -0.1),
                                  (0, MAX_ARGUMENT + 1.0), (0, math.nan)])
def test_domain_errors(n, x):
    with pytest.raises(BesselDomainError):
        bessel_j(n, x)


def test_j0_zero_first():
    assert abs(j0_zero(1) - 2.404825557695773) < 1e-12


def test_j0_zero_near_figure_points():
    # the 8th and 9th zeros bracket the paper's zero-transition points
    assert abs(j0_zero(8) - 24.352471531) < 1e-8
    assert abs(j0_zero(9) - 27.493479132) < 1e-8


@pytest.mark.parametrize("k", [1, 2, 5, 8, 9, 10])
def test_j0_zero_matches_series_bisection(k):
    guess = (k - 0.25) * math.pi
    oracle = bisect_zero(lambda x: series_j(0, x), guess - 0.5, guess + 0.5)
    assert abs(j0_zero(k) - oracle) < 1e-11


@pytest.mark.parametrize("k", range(1, 41))
def test_j0_zero_is_a_root(k):
    assert abs(bessel_j(0, j0_zero(k))) < 1e-10


def test_zero_spacing_tends_to_pi():
    zeros = [j0_zero(k) for k in range(20, 41)]
    assert np.all(np.abs(np.diff(zeros) - math.pi) < 0.01)


@pytest.mark.parametrize("k", [0, 41, -2])
def test_j0_zero_range(k):
    with pytest.raises(BesselDomainError):
        j0_zero(k)
