"""Bessel functions of the first kind, J_n(x), for integer order and real argument.

Values come from Miller's backward recurrence normalized with the identity
``J_0(x) + 2 * sum_k J_2k(x) = 1``. Tiny arguments, where the recurrence
overflows, fall back to the ascending power series.
"""

import math

import numpy as np

from .exceptions import BesselDomainError

MAX_ORDER = 256
MAX_ARGUMENT = 128.0

# extra orders above max(|n|, x) where the backward recurrence starts; the
# turning-point region widens like x**(1/3), so large arguments need more
_START_MARGIN = 40
_MARGIN_PER_CBRT = 12.0
_SERIES_CUTOFF = 1e-2
_RESCALE_AT = 1e200


def _check_domain(n_max, x):
    if not 0 <= n_max <= MAX_ORDER:
        raise BesselDomainError(f"order {n_max} outside [-{MAX_ORDER}, {MAX_ORDER}]")
    if not (0.0 <= x <= MAX_ARGUMENT):
        raise BesselDomainError(f"argument {x!r} outside [0, {MAX_ARGUMENT}]")


def _series(n, x):
    # ascending series; only used for x < _SERIES_CUTOFF, so a handful of terms converge
    half = 0.5 * x
    if half == 0.0:
        return 1.0 if n == 0 else 0.0
    log_lead = n * math.log(half) - math.lgamma(n + 1)
    if log_lead < -745.0:
        return 0.0
    term = math.exp(log_lead)
    total = term
    q = half * half
    k = 0
    while abs(term) > 1e-17 * abs(total):
        k += 1
        term *= -q / (k * (k + n))
        total += term
    return total


def bessel_j_sequence(n_max, x):
    """Return ``[J_0(x), J_1(x), ..., J_{n_max}(x)]`` as a float array.

    Parameters
    ----------
    n_max : int
        Highest order required, ``0 <= n_max <= 256``.
    x : float
        Argument, ``0 <= x <= 128``.
    """
    n_max = int(n_max)
    x = float(x)
    _check_domain(n_max, x)
    out = np.zeros(n_max + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    if x < _SERIES_CUTOFF:
        for n in range(n_max + 1):
            out[n] = _series(n, x)
        return out

    margin = max(_START_MARGIN, math.ceil(_MARGIN_PER_CBRT * x ** (1.0 / 3.0)))
    start = max(n_max, math.ceil(x)) + margin
    start += start % 2  # even start keeps the normalization sum aligned
    two_over_x = 2.0 / x
    j_above = 0.0
    j_here = 1e-30
    norm = 0.0
    for k in range(start, 0, -1):
        if k % 2 == 0:
            norm += 2.0 * j_here
        if k <= n_max:
            out[k] = j_here
        j_below = k * two_over_x * j_here - j_above
        j_above, j_here = j_here, j_below
        if abs(j_here) > _RESCALE_AT:
            j_above /= _RESCALE_AT
            j_here /= _RESCALE_AT
            norm /= _RESCALE_AT
            out /= _RESCALE_AT
    out[0] = j_here
    norm += j_here
    return out / norm


def bessel_j(n, x):
    """Bessel function of the first kind ``J_n(x)`` for integer ``n``.

    Negative orders use ``J_{-n}(x) = (-1)^n J_n(x)``.

    Raises
    ------
    BesselDomainError
        If ``|n| > 256`` or ``x`` lies outside ``[0, 128]``.
    """
    n = int(n)
    order = abs(n)
    value = bessel_j_sequence(order, x)[order]
    if n < 0 and order % 2:
        return -value
    return float(value)


def bessel_j_orders(orders, x):
    """Vectorized ``J_n(x)`` over an integer array of (possibly negative) orders."""
    orders = np.asarray(orders, dtype=int)
    if orders.size == 0:
        return np.zeros(orders.shape)
    table = bessel_j_sequence(int(np.abs(orders).max()), x)
    values = table[np.abs(orders)]
    flip = (orders < 0) & (orders % 2 == 1)
    values[flip] = -values[flip]
    return values


def j0_zero(k, tol=1e-12):
    """k-th positive zero of ``J_0``, for ``1 <= k <= 40``.

    The root is bracketed around McMahon's leading estimate ``(k - 1/4)*pi``
    and refined by bisection until the bracket is narrower than ``tol``.
    """
    k = int(k)
    if not 1 <= k <= 40:
        raise BesselDomainError(f"zero index {k} outside [1, 40]")
    guess = (k - 0.25) * math.pi
    lo, hi = guess - 0.5, guess + 0.6
    f_lo = bessel_j(0, lo)
    if f_lo * bessel_j(0, hi) > 0:
        raise BesselDomainError(f"failed to bracket zero {k}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = bessel_j(0, mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
