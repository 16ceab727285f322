"""Sphere and ball geometry, the conformal action, and sphere kernels.

Points of S^n are unit vectors (x0, xbar) in R^{n+1}; the positive half is
x0 > 0 and the reflection r0 flips x0. The ball B_1(0) in R^n is identified
with the half-sphere by stereographic projection from -e0.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

from .errors import OskitError
from .hyp import hyp2f1, hyp2f1_many
from .linalg import psd_verdict

UNIT_TOL = 1e-12
METRIC_TOL = 1e-10


# conformal group -------------------------------------------------------------


def lorentz_metric(n):
    return np.diag(np.r_[1.0, -np.ones(n + 1)])


@dataclass(frozen=True)
class ConformalElement:
    """Element of O(1, n+1) with positive time orientation, acting on S^n."""

    g: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        object.__setattr__(self, "g", g)
        n = g.shape[0] - 2
        eta = lorentz_metric(n)
        if g.shape != (n + 2, n + 2) or np.linalg.norm(g.T @ eta @ g - eta) > METRIC_TOL * max(1.0, np.linalg.norm(g) ** 2):
            raise OskitError("DOMAIN_VIOLATION", "g does not preserve the Lorentz form")
        if g[0, 0] < 1.0 - METRIC_TOL:
            raise OskitError("DOMAIN_VIOLATION", "g reverses time orientation")

    @property
    def n(self):
        return self.g.shape[0] - 2

    def __matmul__(self, other):
        return ConformalElement(self.g @ other.g)


def boost(n, t, axis=1):
    """Hyperbolic rotation in the (e_-1, e_axis) plane."""
    g = np.eye(n + 2)
    g[0, 0] = g[axis, axis] = np.cosh(t)
    g[0, axis] = g[axis, 0] = np.sinh(t)
    return ConformalElement(g)


def rotation(o):
    """The block element diag(1, O) of the maximal compact subgroup."""
    o = np.asarray(o, dtype=float)
    g = np.eye(o.shape[0] + 1)
    g[1:, 1:] = o
    return ConformalElement(g)


def random_rotation(rng, dim):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    return q * np.sign(np.diag(r))


def random_conformal(rng, n, max_rapidity=1.5):
    k1 = rotation(random_rotation(rng, n + 1))
    k2 = rotation(random_rotation(rng, n + 1))
    return k1 @ boost(n, rng.uniform(-max_rapidity, max_rapidity)) @ k2


def conformal_action(g, x):
    """Return ``(g.x, J(g, x))`` with g.x = J^{-1}(c + d x) and J = a + <b, x>."""
    if not isinstance(g, ConformalElement):
        g = ConformalElement(g)
    x = np.asarray(x, dtype=float)
    if abs(np.linalg.norm(x) - 1.0) > UNIT_TOL:
        raise OskitError("DOMAIN_VIOLATION", "x is not a unit vector")
    m = g.g
    j = m[0, 0] + m[0, 1:] @ x
    if abs(j) < 1e-14:
        raise OskitError("SINGULAR_POINT", "J(g, x) vanishes")
    return (m[1:, 0] + m[1:, 1:] @ x) / j, float(j)


# stereographic projection ----------------------------------------------------


def stereographic(x):
    """Map the ball point x in R^n to the sphere point s(x) in R^{n+1}."""
    x = np.asarray(x, dtype=float)
    r2 = x @ x
    return np.r_[(1.0 - r2) / (1.0 + r2), 2.0 * x / (1.0 + r2)]


def inverse_stereographic(y):
    y = np.asarray(y, dtype=float)
    if abs(1.0 + y[0]) < 1e-14:
        raise OskitError("ANTIPODE", "no preimage for -e0")
    return y[1:] / (1.0 + y[0])


def reflect_r0(y):
    y = np.array(y, dtype=float)
    y[0] = -y[0]
    return y


def sphere_inversion(x):
    """The inversion x -> x / ||x||^2 in the unit sphere."""
    x = np.asarray(x, dtype=float)
    r2 = x @ x
    if r2 == 0:
        raise OskitError("SINGULAR_POINT", "inversion is undefined at 0")
    return x / r2


# kernels ---------------------------------------------------------------------


# "factor2" is the pullback of Q_lambda under stereographic projection (up to
# the conformal factors); "unit" replaces the 2 by 1 and is kept as a
# comparison form, it is not positive even inside the window
R_VARIANTS = ("factor2", "unit")


def q_lambda(u, v, lam, n):
    """(1 - <u, v>)^(lambda - n/2) on S^n."""
    base = 1.0 - float(np.dot(u, v))
    expo = lam - n / 2
    if base <= 0.0:
        if expo < 0:
            raise OskitError("COINCIDENT_POINTS", "u = v for a singular exponent")
        return 0.0 if expo > 0 else 1.0
    return base**expo


def r_lambda(x, y, lam, n, variant="factor2"):
    """The ball kernel (1 - k<x,y> + |x|^2 |y|^2)^(lambda - n/2), k = 2 or 1."""
    if variant not in R_VARIANTS:
        raise OskitError("DOMAIN_VIOLATION", f"unknown variant {variant!r}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x @ x >= 1.0 or y @ y >= 1.0:
        raise OskitError("OUT_OF_BALL", "points must lie in the open unit ball")
    k = 2.0 if variant == "factor2" else 1.0
    return (1.0 - k * (x @ y) + (x @ x) * (y @ y)) ** (lam - n / 2)


def sphere_kernels(lam, n, x, y, variant="factor2"):
    """Q_lambda on the sphere images s(x), s(y) and R_lambda on the ball points."""
    return {
        "Q": q_lambda(stereographic(x), stereographic(y), lam, n),
        "R": r_lambda(x, y, lam, n, variant),
    }


def r_lambda_gram(points, lam, n, variant="factor2"):
    x = np.asarray(points, dtype=float)
    if np.any(np.sum(x * x, axis=1) >= 1.0):
        raise OskitError("OUT_OF_BALL", "points must lie in the open unit ball")
    k = 2.0 if variant == "factor2" else 1.0
    r2 = np.sum(x * x, axis=1)
    base = 1.0 - k * (x @ x.T) + np.outer(r2, r2)
    if np.any(base <= 0):
        raise OskitError("DOMAIN_VIOLATION", "kernel base is not positive on these points")
    return base ** (lam - n / 2)


def lambda_from_mass(m, n):
    """Spectral parameter: real below (n-1)/2, purely imaginary above."""
    half = (n - 1) / 2
    if m * m < half * half:
        return complex(np.sqrt(half * half - m * m), 0.0)
    return complex(0.0, np.sqrt(m * m - half * half))


def psi_parameters(m, n):
    lam = lambda_from_mass(m, n)
    half = (n - 1) / 2
    return half + lam, half - lam, n / 2


def psi_argument(x, y):
    """(1 - x0 y0 + <xbar, ybar>) / 2, the argument of Psi_m."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 0.5 * (1.0 - x[..., 0] * y[..., 0] + np.sum(x[..., 1:] * y[..., 1:], axis=-1))


def psi_kernel(m, n, x, y):
    """Psi_m(x, y) on the closed half-sphere, normalized by gamma = 1."""
    arg = float(psi_argument(x, y))
    if arg >= 1.0:
        raise OskitError("ARGUMENT_ON_CUT", f"argument {arg} lies on [1, inf)")
    a, b, c = psi_parameters(m, n)
    return hyp2f1(a, b, c, arg)


def psi_gram(m, n, points):
    p = np.asarray(points, dtype=float)
    args = 0.5 * (1.0 - np.outer(p[:, 0], p[:, 0]) + p[:, 1:] @ p[:, 1:].T)
    if np.any(args >= 1.0):
        raise OskitError("ARGUMENT_ON_CUT", "some argument lies on [1, inf)")
    a, b, c = psi_parameters(m, n)
    return hyp2f1_many(a, b, c, args)


# constants -------------------------------------------------------------------


def c_n(n):
    return special.gamma((n + 1) / 2) / (np.sqrt(np.pi) * special.gamma(n / 2))


def d_lambda_n(lam, n):
    return (
        2.0 ** (lam + n / 2 - 1)
        * special.gamma((n + 1) / 2)
        * special.gamma(lam)
        / (np.sqrt(np.pi) * special.gamma(lam + n / 2))
    )


def duplication_residual(z):
    lhs = np.sqrt(np.pi) * special.gamma(2 * z)
    rhs = 2.0 ** (2 * z - 1) * special.gamma(z) * special.gamma(z + 0.5)
    return float(abs(lhs - rhs) / abs(lhs))


def beta_integral_closed(z, w):
    """2^(2w+z-2) B(w, w+z-1), the value of int (1-r)^(z-1) (1-r^2)^(w-1) dr."""
    return 2.0 ** (2 * w + z - 2) * special.beta(w, w + z - 1)


@lru_cache(maxsize=None)
def _gl(nodes):
    return leggauss(nodes)


def endpoint_quadrature(log_integrand, alpha, beta, nodes=2048):
    """Integrate f over (-1, 1) where f ~ (1-r)^(alpha-1) at 1 and (1+r)^(beta-1) at -1.

    ``log_integrand(log(1-r), log(1+r))`` returns log f. The interval is split
    at 0 and each half is mapped so that the endpoint power becomes smooth:
    1 - r = w^(1/alpha) near 1 and 1 + r = w^(1/beta) near -1. Working with
    logarithms keeps the mapped nodes free of underflow. Gauss-Legendre with
    ``nodes`` points in total.
    """
    x, wts = _gl(nodes // 2)
    w = 0.5 * (x + 1.0)
    ww = 0.5 * wts
    total = 0.0
    for expo, near_plus in ((alpha, True), (beta, False)):
        log_dist = np.log(w) / expo
        log_other = np.log(2.0 - np.exp(log_dist))
        log_jac = -np.log(expo) + (1.0 / expo - 1.0) * np.log(w)
        if near_plus:
            vals = log_integrand(log_dist, log_other)
        else:
            vals = log_integrand(log_other, log_dist)
        total += np.sum(ww * np.exp(vals + log_jac))
    return float(total)


def sphere_constants(lam, n, nodes=2048):
    """Closed-form c_n and d_{lambda,n} with quadrature cross-checks."""
    if lam <= 0:
        raise OskitError("NONINTEGRABLE", "lambda must be positive")
    expo = lam - n / 2

    def log_integrand(l_minus, l_plus):
        # (1 - r)^expo (1 - r^2)^(n/2 - 1)
        return expo * l_minus + (n / 2 - 1) * (l_minus + l_plus)

    quad = c_n(n) * endpoint_quadrature(log_integrand, lam, n / 2, nodes)
    closed = d_lambda_n(lam, n)
    z, w = expo + 1.0, n / 2
    beta_closed = beta_integral_closed(z, w)
    beta_quad = quad / c_n(n)
    return {
        "c_n": float(c_n(n)),
        "d_lambda_n": float(closed),
        "quadrature": quad,
        "nodes": nodes,
        "d_rel_error": abs(quad - closed) / abs(closed),
        "beta_rel_error": abs(beta_quad - beta_closed) / abs(beta_closed),
        "duplication_residual": max(duplication_residual(t) for t in (0.7, 1.3, 2.5)),
    }


# point sets ------------------------------------------------------------------


def _kronecker(count, dim):
    """Low-discrepancy points in [0,1)^dim from the generalized golden ratio."""
    phi = 2.0
    for _ in range(64):
        phi = (1.0 + phi) ** (1.0 / (dim + 1))
    alpha = (1.0 / phi) ** np.arange(1, dim + 1)
    k = np.arange(1, count + 1)[:, None]
    return np.mod(0.5 + alpha * k, 1.0)


def fibonacci_sphere(n, count):
    """Well-spread deterministic points on S^n (spiral for n = 2)."""
    if n == 1:
        ang = 2 * np.pi * (np.arange(count) + 0.5) / count
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if n == 2:
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        golden = np.pi * (3.0 - np.sqrt(5.0))
        rho = np.sqrt(1.0 - z * z)
        return np.column_stack([z, rho * np.cos(golden * i), rho * np.sin(golden * i)])
    u = np.clip(_kronecker(count, n + 1), 1e-9, 1 - 1e-9)
    g = special.ndtri(u)
    return g / np.linalg.norm(g, axis=1)[:, None]


def half_sphere_points(n, count, min_angle=0.15, margin=0.05):
    """``count`` lattice points of S^n with x0 > margin and pairwise angle >= min_angle."""
    total = 4 * count
    for _ in range(12):
        cand = fibonacci_sphere(n, total)
        cand = cand[cand[:, 0] > margin]
        chosen = []
        for p in cand:
            if all(np.arccos(np.clip(p @ q, -1, 1)) >= min_angle for q in chosen):
                chosen.append(p)
                if len(chosen) == count:
                    return np.array(chosen)
        total *= 2
    raise OskitError("DOMAIN_VIOLATION", "could not place the requested number of points")


def spread_directions(n, count, seed=0, iterations=300):
    """``count`` unit vectors in R^n spread by deterministic repulsion."""
    if n == 1:
        return np.where(np.arange(count) % 2 == 0, 1.0, -1.0)[:, None]
    if n == 2:
        ang = 2 * np.pi * (np.arange(count) + 0.5 * (seed % 2)) / count
        return np.column_stack([np.cos(ang), np.sin(ang)])
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(count, n))
    x /= np.linalg.norm(x, axis=1)[:, None]
    for _ in range(iterations):
        diff = x[:, None, :] - x[None, :, :]
        d2 = np.sum(diff**2, axis=-1) + np.eye(count)
        force = np.sum(diff / d2[..., None] ** 1.5, axis=1)
        x = x + 0.05 * force / count * 10
        x /= np.linalg.norm(x, axis=1)[:, None]
    return x


def ball_points(n, count=40, radii=(0.5, 0.75, 0.92)):
    """The origin plus shells of spread directions; deterministic."""
    per = (count - 1) // len(radii)
    extra = count - 1 - per * len(radii)
    pts = [np.zeros(n)]
    for i, r in enumerate(radii):
        k = per + (1 if i < extra else 0)
        pts.extend(r * spread_directions(n, k, seed=i + 1))
    return np.array(pts)


def r_lambda_window_check(n, lam, points=None, variant="factor2", tol=1e-8):
    pts = ball_points(n) if points is None else points
    return psd_verdict(r_lambda_gram(pts, lam, n, variant), tol)


def in_positivity_window(lam, n):
    """Whether R_lambda is predicted PSD: lambda = n/2 or lambda <= min(n/2, 1)."""
    return bool(np.isclose(lam, n / 2) or lam <= min(n / 2, 1.0))
