"""Closed-form kernel catalog, reflected Grams and positivity checks.

Kernels are described by a :class:`KernelSpec` (family name plus parameters)
and live on a :class:`ReflectionGeometry` (X, X+, tau). Gram matrices are
always assembled from exact closed forms; CUSTOM kernels are exact tables.
"""

from dataclasses import dataclass, field

import numpy as np

from . import sphere
from .errors import OskitError
from .hyp import hyp2f1_many
from .linalg import psd_verdict
from .measures import SpectralMeasure
from .quadrature import composite_rule

FOURIER_CONVENTION = "nu_m = (1/pi) dp / (m^2 + p^2)"

FAMILIES = ("EXP_LINE", "PERIODIC_GREEN", "POWER_LAW", "SPHERE_Q", "SPHERE_R", "HYP_PSI", "CUSTOM")


@dataclass(frozen=True)
class KernelSpec:
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise OskitError("SCHEMA_ERROR", f"unknown kernel family {self.family!r}")
        p = self.params
        need = {
            "EXP_LINE": ("lam",),
            "PERIODIC_GREEN": ("lam", "beta"),
            "POWER_LAW": ("a", "d"),
            "SPHERE_Q": ("lam", "n"),
            "SPHERE_R": ("lam", "n"),
            "HYP_PSI": ("m", "n"),
            "CUSTOM": ("points", "values"),
        }[self.family]
        missing = [k for k in need if k not in p]
        if missing:
            raise OskitError("SCHEMA_ERROR", f"{self.family} needs parameters {missing}")
        if "lam" in p and self.family in ("EXP_LINE", "PERIODIC_GREEN") and p["lam"] < 0:
            raise OskitError("DOMAIN_VIOLATION", "lambda must be nonnegative")
        if "beta" in p and p["beta"] <= 0:
            raise OskitError("DOMAIN_VIOLATION", "beta must be positive")
        if self.family == "POWER_LAW" and not 0 <= p["a"] < p["d"]:
            raise OskitError("DOMAIN_VIOLATION", "POWER_LAW needs 0 <= a < d")
        if "n" in p and p["n"] < 1:
            raise OskitError("DOMAIN_VIOLATION", "n must be at least 1")


def exp_line(lam):
    return KernelSpec("EXP_LINE", {"lam": lam})


def periodic_green(lam, beta):
    return KernelSpec("PERIODIC_GREEN", {"lam": lam, "beta": beta})


def power_law(a, d):
    return KernelSpec("POWER_LAW", {"a": a, "d": d})


def sphere_q(lam, n):
    return KernelSpec("SPHERE_Q", {"lam": lam, "n": n})


def sphere_r(lam, n, variant="factor2"):
    return KernelSpec("SPHERE_R", {"lam": lam, "n": n, "variant": variant})


def hyp_psi(m, n):
    return KernelSpec("HYP_PSI", {"m": m, "n": n})


def custom(points, values):
    return KernelSpec("CUSTOM", {"points": [tuple(np.atleast_1d(p)) for p in points], "values": np.asarray(values)})


GEOMETRIES = ("LINE", "INTERVAL", "CIRCLE", "HALFSPACE", "HALFBALL")


@dataclass(frozen=True)
class ReflectionGeometry:
    tag: str
    param: float = None

    def __post_init__(self):
        if self.tag not in GEOMETRIES:
            raise OskitError("SCHEMA_ERROR", f"unknown geometry {self.tag!r}")

    def tau(self, x):
        x = np.array(x, dtype=float)
        if self.tag in ("LINE", "INTERVAL"):
            return -x
        if self.tag == "CIRCLE":
            return np.mod(-x, self.param)
        x[..., 0] = -x[..., 0]
        return x

    def in_plus(self, x):
        x = np.asarray(x, dtype=float)
        if self.tag == "LINE":
            return x > 0
        if self.tag == "INTERVAL":
            return (x > 0) & (x < self.param)
        if self.tag == "CIRCLE":
            return (x >= 0) & (x <= self.param / 2)
        return x[..., 0] > 0


def _pairwise_distance(x, y):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if x.shape[0] == 1 and x.shape[1] > 1 and y.shape[1] == 1:
        x = x.T
    return np.sqrt(np.maximum(np.sum((x[:, None, :] - y[None, :, :]) ** 2, axis=-1), 0.0))


def _as_line(points):
    return np.asarray(points, dtype=float).reshape(-1)


def periodic_green_value(t, lam, beta):
    """e^{-lam x} + e^{-lam (beta - x)} with x = t mod beta."""
    x = np.mod(t, beta)
    return np.exp(-lam * x) + np.exp(-lam * (beta - x))


def cross_matrix(kernel, xs, ys):
    """Matrix of K(x_i, y_j)."""
    f, p = kernel.family, kernel.params
    if f == "EXP_LINE":
        x, y = _as_line(xs), _as_line(ys)
        return np.exp(-p["lam"] * np.abs(x[:, None] - y[None, :]))
    if f == "PERIODIC_GREEN":
        x, y = _as_line(xs), _as_line(ys)
        return periodic_green_value(x[:, None] - y[None, :], p["lam"], p["beta"])
    if f == "POWER_LAW":
        x = np.asarray(xs, dtype=float).reshape(len(xs), -1)
        y = np.asarray(ys, dtype=float).reshape(len(ys), -1)
        dist = _pairwise_distance(x, y)
        if p["a"] > 0 and np.any(dist == 0):
            raise OskitError("COINCIDENT_POINTS", "power-law kernel is singular on the diagonal")
        return dist ** (-p["a"])
    if f == "SPHERE_Q":
        u = np.asarray(xs, dtype=float)
        v = np.asarray(ys, dtype=float)
        base = 1.0 - u @ v.T
        expo = p["lam"] - p["n"] / 2
        if expo < 0 and np.any(base <= 1e-15):
            raise OskitError("COINCIDENT_POINTS", "Q_lambda is singular on the diagonal")
        return np.maximum(base, 0.0) ** expo
    if f == "SPHERE_R":
        x = np.asarray(xs, dtype=float)
        y = np.asarray(ys, dtype=float)
        if np.any(np.sum(x * x, 1) >= 1) or np.any(np.sum(y * y, 1) >= 1):
            raise OskitError("OUT_OF_BALL", "points must lie in the open unit ball")
        k = 2.0 if p.get("variant", "factor2") == "factor2" else 1.0
        base = 1.0 - k * (x @ y.T) + np.outer(np.sum(x * x, 1), np.sum(y * y, 1))
        return base ** (p["lam"] - p["n"] / 2)
    if f == "HYP_PSI":
        x = np.asarray(xs, dtype=float)
        y = np.asarray(ys, dtype=float)
        args = 0.5 * (1.0 - np.outer(x[:, 0], y[:, 0]) + x[:, 1:] @ y[:, 1:].T)
        if np.any(args >= 1.0):
            raise OskitError("ARGUMENT_ON_CUT", "some argument lies on [1, inf)")
        a, b, c = sphere.psi_parameters(p["m"], p["n"])
        return hyp2f1_many(a, b, c, args)
    # CUSTOM: exact lookup, no interpolation
    index = {pt: i for i, pt in enumerate(p["points"])}
    values = np.asarray(p["values"])
    try:
        ix = [index[tuple(np.atleast_1d(x))] for x in xs]
        iy = [index[tuple(np.atleast_1d(y))] for y in ys]
    except KeyError as exc:
        raise OskitError("DOMAIN_VIOLATION", f"point {exc.args[0]} is not in the sample table") from None
    return values[np.ix_(ix, iy)]


def gram(kernel, points):
    """Hermitian Gram matrix K(x_i, x_j)."""
    m = cross_matrix(kernel, points, points)
    return 0.5 * (m + np.conj(m.T))


def reflected_gram(kernel, geometry, points):
    """Gram matrix of K^tau(x, y) = K(x, tau y) on points of X+.

    SPHERE_R and HYP_PSI are already the reflected kernels in their
    coordinates (ball points, resp. half-sphere points) and are used as is.
    """
    pts = np.asarray(points, dtype=float)
    if not np.all(geometry.in_plus(pts)):
        raise OskitError("DOMAIN_VIOLATION", "points must lie in X+")
    if kernel.family in ("SPHERE_R", "HYP_PSI"):
        return gram(kernel, pts)
    m = cross_matrix(kernel, pts, geometry.tau(pts))
    return 0.5 * (m + np.conj(m.T))


# Fourier coefficients of the periodic Green kernel ---------------------------


def periodic_fourier_closed(n, lam, beta):
    n = np.asarray(n, dtype=float)
    return 2 * beta * lam * (1 - np.exp(-beta * lam)) / ((lam * beta) ** 2 + (2 * np.pi * n) ** 2)


def periodic_fourier_coefficients(lam, beta, n_max, nodes=4096, order=32):
    """Closed-form c_n against (1/beta) int_0^beta phi(x) e^{-2 pi i n x / beta} dx."""
    ns = np.arange(-n_max, n_max + 1)
    closed = periodic_fourier_closed(ns, lam, beta)
    panels = nodes // order
    t, wt = composite_rule(0.0, beta, panels, order)
    phi = np.exp(-lam * t) + np.exp(-lam * (beta - t))
    quad = (np.exp(-2j * np.pi * np.outer(ns, t) / beta) @ (wt * phi)) / beta
    rel = np.abs(quad - closed) / np.abs(closed)
    return {
        "n": ns,
        "closed_form": closed,
        "quadrature": quad,
        "max_rel_error": float(rel.max()),
        "min_coefficient": float(closed.min()),
        "nodes": panels * order,
    }


# interval checks -------------------------------------------------------------


def chebyshev_nodes(lo, hi, count):
    k = np.arange(count)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(np.pi * (k + 0.5) / count)


def laplace_function(measure, t):
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for loc, w in measure.atoms:
        total = total + w * np.exp(-loc * np.abs(t))
    return total


def widder_slope(measure, a):
    """Left derivative at a of t -> sum_j w_j e^{-lambda_j t}."""
    return float(-sum(loc * w * np.exp(-loc * a) for loc, w in measure.atoms))


def interval_rp_check(measure, a, grid_size=24, tol=1e-8, slope_tol=1e-12):
    """Group kernel phi((t-s)/2) on (-a, a) and semigroup kernel phi((t+s)/2) on (0, a)."""
    if not isinstance(measure, SpectralMeasure):
        measure = SpectralMeasure(tuple(measure), "real")
    if measure.is_matrix:
        raise OskitError("SCHEMA_ERROR", "interval checks take scalar weights")
    t = chebyshev_nodes(-a, a, grid_size)
    s = chebyshev_nodes(0.0, a, grid_size)
    group = psd_verdict(laplace_function(measure, 0.5 * (t[:, None] - t[None, :])), tol)
    semigroup = psd_verdict(laplace_function(measure, 0.5 * (s[:, None] + s[None, :])), tol)
    slope = widder_slope(measure, a)
    scale = max(1.0, sum(abs(loc * w) for loc, w in measure.atoms))
    predicted = slope <= slope_tol * scale
    return {
        "group_kernel": group,
        "semigroup_kernel": semigroup,
        "widder_slope": slope,
        "slope_predicts_rp": predicted,
        "prediction_consistent": (not predicted) or (group.is_psd and semigroup.is_psd),
    }
