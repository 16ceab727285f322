"""Mass measures, euclidean densities, two-point functions and half-space positivity.

Convention: a single mass m contributes dnu_m(p) = (1/pi) dp / (m^2 + p^2),
so Theta(p) = (1/pi) sum_j w_j / (m_j^2 + |p|^2). The delta_0 part of the
light-cone measure is fixed to zero; a constant summand would only add a
rank-one PSD block to every Gram matrix.
"""

import functools
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import OskitError
from .linalg import psd_verdict

DIMENSIONS = (1, 3)


def power_window(d):
    """Open interval of tempered exponents s for dimension d."""
    return max(0.0, 2.0 - d), 2.0


@dataclass(frozen=True)
class MassMeasure:
    """``kind`` is "atomic" with atoms ((m, w), ...) or "power" with exponent s.

    The power family is rho_s = m^{s-1} dm.
    """

    kind: str
    atoms: tuple = ()
    s: float = None

    def __post_init__(self):
        if self.kind == "atomic":
            atoms = tuple((float(m), float(w)) for m, w in self.atoms)
            if not atoms:
                raise OskitError("SCHEMA_ERROR", "atomic measure needs at least one atom")
            if any(m <= 0 or w < 0 for m, w in atoms):
                raise OskitError("DOMAIN_VIOLATION", "atoms need m > 0 and w >= 0")
            object.__setattr__(self, "atoms", atoms)
        elif self.kind == "power":
            if self.s is None:
                raise OskitError("SCHEMA_ERROR", "power measure needs s")
        else:
            raise OskitError("SCHEMA_ERROR", f"unknown mass measure kind {self.kind!r}")

    @classmethod
    def atomic(cls, *atoms):
        return cls("atomic", tuple(atoms))

    @classmethod
    def power(cls, s):
        return cls("power", s=float(s))

    @classmethod
    def from_json(cls, obj):
        if obj.get("kind") == "atomic":
            return cls.atomic(*[(a["m"], a.get("w", 1.0)) for a in obj["atoms"]])
        if obj.get("kind") == "power":
            return cls.power(obj["s"])
        raise OskitError("SCHEMA_ERROR", "mass measure kind must be atomic or power")

    def masses(self):
        return np.array([m for m, _ in self.atoms])

    def weights(self):
        return np.array([w for _, w in self.atoms])


def _require_tame(rho, d):
    if d not in DIMENSIONS:
        raise OskitError("DOMAIN_VIOLATION", f"d must be one of {DIMENSIONS}")
    if rho.kind == "power":
        lo, hi = power_window(d)
        if not lo < rho.s < hi:
            raise OskitError("NOT_TAME", f"s = {rho.s} outside the tempered window ({lo}, {hi}) for d = {d}")


def _require_atomic(rho):
    if rho.kind != "atomic":
        raise OskitError("NOT_TAME", "this operation needs an atomic mass measure")


# Theta -------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def theta_power_constant(s):
    """(1/pi) int_0^inf u^{s-1} / (1 + u^2) du, by quadrature."""
    kw = dict(limit=400, epsabs=0.0, epsrel=1e-13)
    head, _ = integrate.quad(lambda u: u ** (s - 1) / (1 + u * u), 0.0, 1.0, **kw)
    tail, _ = integrate.quad(lambda u: u ** (1 - s) / (1 + u * u), 0.0, 1.0, **kw)
    return (head + tail) / np.pi


def theta_power_closed(s):
    return 1.0 / (2.0 * np.sin(np.pi * s / 2))


def theta_density(rho, d, p):
    """Theta(p) as a function of |p| (p may be a vector or an array of norms)."""
    _require_tame(rho, d)
    r = np.linalg.norm(np.atleast_1d(p), axis=-1) if np.ndim(p) and np.shape(p)[-1] == d and d > 1 else np.abs(p)
    r = np.asarray(r, dtype=float)
    if rho.kind == "atomic":
        return sum(w / (m * m + r * r) for m, w in rho.atoms) / np.pi
    if np.any(r == 0):
        raise OskitError("ORIGIN_SINGULARITY", "power-law Theta is singular at p = 0")
    return theta_power_constant(rho.s) * r ** (rho.s - 2)


def theta_power_quadrature(s, p):
    """(1/pi) int_0^inf m^{s-1} / (m^2 + p^2) dm at a single p > 0."""
    kw = dict(limit=400, epsabs=0.0, epsrel=1e-12)
    head, _ = integrate.quad(lambda m: m ** (s - 1) / (m * m + p * p), 0.0, p, **kw)
    tail, _ = integrate.quad(lambda m: m ** (s - 1) / (m * m + p * p), p, np.inf, **kw)
    return (head + tail) / np.pi


def theta_t(rho, t, pbar=0.0):
    """sum_j w_j e^{-|t| omega_j} / omega_j with omega_j = sqrt(m_j^2 + |pbar|^2)."""
    _require_atomic(rho)
    q2 = float(np.sum(np.square(pbar)))
    omega = np.sqrt(rho.masses() ** 2 + q2)
    return float(np.sum(rho.weights() * np.exp(-abs(t) * omega) / omega))


def theta_t_quadrature(rho, t, pbar=0.0):
    """int_R e^{-i t p0} Theta(p0, pbar) dp0 by quadrature."""
    _require_atomic(rho)
    q2 = float(np.sum(np.square(pbar)))

    def theta(p0):
        return sum(w / (m * m + q2 + p0 * p0) for m, w in rho.atoms) / np.pi

    if t == 0:
        val, _ = integrate.quad(theta, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=400)
    else:
        # QAWF flags slow cycles for small t; the value is still accurate
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(theta, 0.0, np.inf, weight="cos", wvar=abs(t), epsabs=1e-14, limlst=100)
    return 2.0 * val


def theta_t_check(rho, ts, pbars):
    """Largest relative deviation of the closed form from the p0 quadrature."""
    worst = 0.0
    for t in ts:
        for q in pbars:
            closed = theta_t(rho, t, q)
            worst = max(worst, abs(closed - theta_t_quadrature(rho, t, q)) / closed)
    return worst


def multiplicativity_deviation(rho, t, s, pbar=0.0):
    """|r(t + s) - r(t) r(s)| with r(t) = Theta_t / Theta_0."""
    base = theta_t(rho, 0.0, pbar)

    def ratio(x):
        return theta_t(rho, x, pbar) / base

    return abs(ratio(t + s) - ratio(t) * ratio(s))


# two-point functions -----------------------------------------------------------


@functools.lru_cache(maxsize=None)
def schwinger_constant_3d():
    """c with nu^(x) = c e^{-m r} / r for m = 1, d = 3.

    nu^(x) = (4 pi / r) int_0^inf p sin(p r) Theta(p) dp, evaluated at r = 1.
    """
    val, _ = integrate.quad(lambda p: p / (1.0 + p * p) / np.pi, 0.0, np.inf, weight="sin", wvar=1.0, limlst=200)
    return 4.0 * np.pi * val * np.e


def schwinger_2pt(rho, d, x):
    """Euclidean two-point function nu^(x) for d in {1, 3}."""
    _require_atomic(rho)
    if d not in DIMENSIONS:
        raise OskitError("DOMAIN_VIOLATION", f"d must be one of {DIMENSIONS}")
    x = np.asarray(x, dtype=float)
    if d == 1:
        r = np.abs(x)
        return sum(w * np.exp(-m * r) / m for m, w in rho.atoms)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise OskitError("ORIGIN_SINGULARITY", "nu^ is singular at the origin for d = 3")
    c = schwinger_constant_3d()
    return sum(w * c * np.exp(-m * r) / r for m, w in rho.atoms)


def ode_residual(m, xs, h=2e-4):
    """max |(m^2 - d^2/dx^2) nu^(x)| off the origin for a single mass, d = 1."""
    rho = MassMeasure.atomic((m, 1.0))
    xs = np.asarray(xs, dtype=float)
    if np.any(np.abs(xs) <= 2 * h):
        raise OskitError("ORIGIN_SINGULARITY", "sample points must stay away from 0")
    f0 = schwinger_2pt(rho, 1, xs)
    second = (schwinger_2pt(rho, 1, xs + h) - 2 * f0 + schwinger_2pt(rho, 1, xs - h)) / (h * h)
    return float(np.max(np.abs(m * m * f0 - second)))


def log_slope(xs, ys):
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def power_schwinger_quadrature(s, d, r):
    """int_0^inf m^{s-1} nu^_m(r) dm for the power family."""
    if d == 1:
        f = lambda m: m ** (s - 2) * np.exp(-m * r)
    else:
        c = schwinger_constant_3d()
        f = lambda m: m ** (s - 1) * c * np.exp(-m * r) / r
    head, _ = integrate.quad(f, 0.0, 1.0 / r, epsabs=0.0, epsrel=1e-12, limit=400)
    tail, _ = integrate.quad(f, 1.0 / r, np.inf, epsabs=0.0, epsrel=1e-12, limit=400)
    return head + tail


def power_schwinger_closed(s, d, r):
    if d == 1:
        return special.gamma(s - 1) * np.abs(r) ** (1 - s)
    return schwinger_constant_3d() * special.gamma(s) * np.abs(r) ** (-1 - s)


def power_law_slopes(s, d, grid=None):
    """Measured log-log slopes of Theta_s and nu^_s, both from quadrature over m."""
    rho = MassMeasure.power(s)
    _require_tame(rho, d)
    grid = np.geomspace(0.5, 5.0, 12) if grid is None else np.asarray(grid)
    theta = [theta_power_quadrature(s, p) for p in grid]
    nu = [power_schwinger_quadrature(s, d, r) for r in grid]
    return {
        "theta_slope": log_slope(grid, theta),
        "theta_expected": s - 2,
        "nu_slope": log_slope(grid, nu),
        "nu_expected": -(d - 2 + s),
        "theta_constant": theta_power_constant(s),
        "theta_constant_closed": theta_power_closed(s),
    }


# half-space positivity -----------------------------------------------------------


def reflect(points):
    """tau(x0, xbar) = (-x0, xbar)."""
    pts = np.array(points, dtype=float)
    if pts.ndim == 1:
        return -pts
    pts[:, 0] = -pts[:, 0]
    return pts


def _halfspace_points(points, d):
    pts = np.asarray(points, dtype=float)
    pts = pts.reshape(-1, 1) if d == 1 else pts.reshape(-1, d)
    if np.any(pts[:, 0] <= 0):
        raise OskitError("DOMAIN_VIOLATION", "points must satisfy x0 > 0")
    return pts


def halfspace_gram(rho, d, points):
    """Gram entries nu^(tau x_i - x_j); power families use |.|^{-(d - 2 + s)}."""
    pts = _halfspace_points(points, d)
    diff = reflect(pts)[:, None, :] - pts[None, :, :]
    if rho.kind == "power":
        _require_tame(rho, d)
        return power_kernel_gram(d - 2 + rho.s, pts)
    g = schwinger_2pt(rho, 1, diff[..., 0]) if d == 1 else schwinger_2pt(rho, 3, diff)
    return 0.5 * (g + g.T)


def power_kernel_gram(a, points):
    """|tau x_i - x_j|^{-a} for any exponent a (no window check)."""
    pts = np.asarray(points, dtype=float)
    pts = pts.reshape(len(pts), -1)
    diff = reflect(pts)[:, None, :] - pts[None, :, :]
    g = np.linalg.norm(diff, axis=-1) ** (-a)
    return 0.5 * (g + g.T)


def halfspace_rp_check(rho, d, points, tol=1e-8):
    return psd_verdict(halfspace_gram(rho, d, points), tol)


def halfspace_samples(rng, d, count, scale=3.0):
    """Random points of the open half-space x0 > 0."""
    x0 = rng.uniform(0.05, scale, size=count)
    if d == 1:
        return x0
    rest = rng.uniform(-scale, scale, size=(count, d - 1))
    return np.column_stack([x0, rest])
