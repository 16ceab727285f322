"""Gauss hypergeometric function 2F1(a, b; c; x) for real x < 1.

Parameters may be complex. The power series is summed directly on
|x| <= 1/2; the Pfaff transformation maps x < -1/2 into (1/3, 1), and the
connection formula around x = 1 handles 1/2 < x < 1. When c - a - b is (close
to) an integer that formula degenerates, and when its two terms cancel badly
the direct series is used instead.
"""

import numpy as np
from scipy import special

from ._accel import hyp2f1_series, hyp2f1_series_many
from .errors import OskitError

MAX_TERMS = 10_000
SERIES_TOL = 1e-16
# below this distance from an integer the connection formula loses digits
DEGENERATE_GAP = 1e-3
# accepted ratio (|first| + |second|) / |sum| in the connection formula before
# the direct series is preferred (the series still converges fast up to 0.9)
CANCELLATION_LIMIT = 1e2
SERIES_FALLBACK_MAX_X = 0.9


def _check_c(c):
    c = complex(c)
    if c.imag == 0 and c.real <= 0 and float(c.real).is_integer():
        raise OskitError("BAD_C", f"c = {c.real:g} is a nonpositive integer")


def _series(a, b, c, x):
    value, nterms = hyp2f1_series(a, b, c, x, SERIES_TOL, MAX_TERMS)
    if nterms < 0:
        raise OskitError("NONCONVERGENT", f"series cap {MAX_TERMS} reached at x = {x}")
    return complex(value)


def _near_one(a, b, c, x):
    """Evaluate on 1/2 < x < 1 via the connection formula around 1."""
    s = c - a - b
    if abs(s - round(s.real)) < DEGENERATE_GAP:
        return _series(a, b, c, x)
    y = 1.0 - x
    g = special.gamma
    rg = special.rgamma
    first = g(c) * g(s) * rg(c - a) * rg(c - b) * _series(a, b, 1 - s, y)
    second = y**s * g(c) * g(-s) * rg(a) * rg(b) * _series(c - a, c - b, 1 + s, y)
    total = complex(first + second)
    spread = abs(first) + abs(second)
    if x <= SERIES_FALLBACK_MAX_X and spread > CANCELLATION_LIMIT * abs(total):
        return _series(a, b, c, x)
    return total


def _unit_interval(a, b, c, x):
    if x <= 0.5:
        return _series(a, b, c, x)
    return _near_one(a, b, c, x)


def hyp2f1(a, b, c, x):
    """2F1(a, b; c; x) for real ``x < 1`` with complex parameters."""
    a, b, c = complex(a), complex(b), complex(c)
    x = float(x)
    _check_c(c)
    if not x < 1.0:
        raise OskitError("DOMAIN_VIOLATION", f"x = {x} is not below 1")
    if x == 0.0:
        return 1.0 + 0.0j
    if x < -0.5:
        z = x / (x - 1.0)
        return complex((1.0 - x) ** (-a) * _unit_interval(a, c - b, c, z))
    if x <= 0.5:
        return _series(a, b, c, x)
    return _near_one(a, b, c, x)


def hyp2f1_many(a, b, c, xs):
    """Vectorized :func:`hyp2f1`; series-range points go through the batch kernel."""
    xs = np.asarray(xs, dtype=np.float64)
    flat = xs.ravel()
    out = np.empty(flat.shape, dtype=complex)
    _check_c(c)
    if np.any(flat >= 1.0):
        raise OskitError("DOMAIN_VIOLATION", "arguments must be below 1")
    inner = np.abs(flat) <= 0.5
    if inner.any():
        vals, counts = hyp2f1_series_many(complex(a), complex(b), complex(c), np.ascontiguousarray(flat[inner]), SERIES_TOL, MAX_TERMS)
        if np.any(counts < 0):
            raise OskitError("NONCONVERGENT", f"series cap {MAX_TERMS} reached")
        out[inner] = vals
    for i in np.flatnonzero(~inner):
        out[i] = hyp2f1(a, b, c, flat[i])
    return out.reshape(xs.shape)


def hyp2f1_alternative(a, b, c, x):
    """A second, algebraically different evaluation path used as an oracle.

    x < -1/2: Pfaff in b instead of a. -1/2 <= x < 0: raw series at the Pfaff
    image. 0 <= x < 1: Euler's transformation.
    """
    a, b, c = complex(a), complex(b), complex(c)
    x = float(x)
    if x < -0.5:
        z = x / (x - 1.0)
        return complex((1.0 - x) ** (-b) * _unit_interval(c - a, b, c, z))
    if x < 0.0:
        z = x / (x - 1.0)
        return complex((1.0 - x) ** (-a) * _series(a, c - b, c, z))
    return complex((1.0 - x) ** (c - a - b) * hyp2f1(c - a, c - b, c, x))


def pfaff_image_check(a, b, c, x):
    """Raw series at ``x`` against the transformed evaluation at its Pfaff image."""
    raw = _series(complex(a), complex(b), complex(c), x)
    z = x / (x - 1.0)
    other = (1.0 - x) ** (-complex(a)) * _series(complex(a), complex(c) - complex(b), complex(c), z)
    return raw, complex(other)
