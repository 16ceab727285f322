"""Hermitian contraction semigroups and their minimal unitary dilation.

Everything is diagonal: a semigroup C_t = exp(-tH) is given by the eigenvalues
h_i >= 0 of H, and vectors are coefficient arrays in that eigenbasis.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import OskitError
from .linalg import psd_verdict
from .measures import SpectralMeasure
from .quadrature import composite_rule

TRUNCATION = 1e3


class ZeroEigenvalueWarning(UserWarning):
    """Emitted when a component with h = 0 is excluded from a quadrature."""


@dataclass(frozen=True)
class HermitianSemigroup:
    generator_eigs: tuple

    def __post_init__(self):
        eigs = tuple(float(h) for h in np.atleast_1d(self.generator_eigs))
        if any(h < 0 for h in eigs):
            raise OskitError("DOMAIN_VIOLATION", "generator eigenvalues must be nonnegative")
        object.__setattr__(self, "generator_eigs", eigs)

    @property
    def eigs(self):
        return np.array(self.generator_eigs)

    def apply(self, t, vec):
        return np.exp(-abs(t) * self.eigs) * np.asarray(vec)


def rp_function(measure, t):
    """phi(t) = sum_j exp(-lambda_j |t|) W_j for a measure on [0, inf)."""
    if measure.support != "nonneg" or np.any(measure.locations < 0):
        raise OskitError("NEGATIVE_LOCATION", "rp_function needs a measure on [0, inf)")
    return measure.laplace(t)


def block_gram(measure, times, semigroup=False):
    """Block matrix phi(t_i - t_j), or phi(t_i + t_j) when ``semigroup``."""
    times = np.asarray(times, dtype=float)
    blocks = [[np.atleast_2d(rp_function(measure, (ti + tj) if semigroup else (ti - tj))) for tj in times] for ti in times]
    return np.block(blocks)


# dilation pairing --------------------------------------------------------------


def _cauchy_tail(h, t, p):
    """int_P^inf h cos(tp) / (h^2 + p^2) dp by repeated integration by parts.

    Returns the value and a bound on the neglected remainder.
    """
    if t == 0:
        return np.pi / 2 - np.arctan(p / h), 0.0
    q = h * h + p * p
    g0 = h / q
    g1 = -2 * h * p / q**2
    g2 = h * (6 * p * p - 2 * h * h) / q**3
    g3 = 24 * h * p * (h * h - p * p) / q**4
    s, c = np.sin(t * p), np.cos(t * p)
    value = -g0 * s / t - g1 * c / t**2 + g2 * s / t**3 + g3 * c / t**4
    return value, abs(g3) / t**4


def _cauchy_pairing_quadrature(h, t, p_max):
    """(1/pi) int_R h e^{itp} / (h^2 + p^2) dp, truncated at p_max plus tail."""
    kw = dict(limit=2000, epsabs=1e-14, epsrel=1e-10)
    if t == 0:
        core, _ = integrate.quad(lambda p: h / (h * h + p * p), 0.0, p_max, **kw)
    else:
        core, _ = integrate.quad(lambda p: h / (h * h + p * p), 0.0, p_max, weight="cos", wvar=abs(t), **kw)
    tail, bound = _cauchy_tail(h, abs(t), p_max)
    return 2.0 / np.pi * (core + tail), 2.0 / np.pi * bound


def dilation_pairing(semigroup, xi, eta, t, tol=1e-6, p_max=TRUNCATION):
    """<j xi, U_t j eta> in closed form and by quadrature in momentum space.

    The closed form is sum_i conj(xi_i) eta_i exp(-|t| h_i). The quadrature
    integrates (1/pi) |j^(p)|^2 e^{itp} with j^(p) = h^{1/2} / (h + ip) over
    |p| <= P and adds an integration-by-parts tail; P is doubled until the
    tail remainder bound is below 0.1 * tol relative to the closed form.
    """
    h = semigroup.eigs
    xi = np.asarray(xi, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    if xi.shape != h.shape or eta.shape != h.shape:
        raise OskitError("DOMAIN_VIOLATION", "coefficient vectors must match the generator")
    coeff = np.conj(xi) * eta
    closed = complex(np.sum(coeff * np.exp(-abs(t) * h)))
    skipped = [i for i, hi in enumerate(h) if hi == 0]
    if skipped:
        warnings.warn(f"ZERO_EIGENVALUE_QUADRATURE: components {skipped} skipped", ZeroEigenvalueWarning, stacklevel=2)
    target = 0.1 * tol * max(abs(closed), 1e-300)
    quad_total = 0j
    bound_total = 0.0
    p_used = p_max
    for i, hi in enumerate(h):
        if hi == 0 or coeff[i] == 0:
            continue
        p = p_max
        value, bound = _cauchy_pairing_quadrature(hi, t, p)
        while abs(coeff[i]) * bound > target and p < 1e9:
            p *= 2
            value, bound = _cauchy_pairing_quadrature(hi, t, p)
        p_used = max(p_used, p)
        quad_total += coeff[i] * value
        bound_total += abs(coeff[i]) * bound
    reference = closed - complex(np.sum(coeff[skipped] * np.exp(-abs(t) * h[skipped]))) if skipped else closed
    rel = abs(quad_total - reference) / max(abs(reference), 1e-300)
    return {
        "closed_form": closed,
        "quadrature": quad_total,
        "rel_discrepancy": float(rel),
        "truncation": float(p_used),
        "tail_bound": float(bound_total),
        "skipped_components": skipped,
    }


# Hardy space twisted inner product -------------------------------------------


def _check_half_plane(*points):
    for z in points:
        if complex(z).real <= 0:
            raise OskitError("NONPOSITIVE_REAL_PART", f"Re {z} <= 0")


def hardy_residue(semigroup, z, w, xi, eta):
    """4 pi sum_i conj(xi_i) eta_i h_i / ((h_i + z)(h_i + conj(w)))."""
    _check_half_plane(z, w)
    h = semigroup.eigs
    if np.any(h <= 0):
        raise OskitError("DOMAIN_VIOLATION", "the Hardy model needs h_i > 0")
    coeff = np.conj(np.asarray(xi, dtype=complex)) * np.asarray(eta, dtype=complex)
    return complex(4 * np.pi * np.sum(coeff * h / ((h + z) * (h + np.conj(w)))))


def _complex_quad(f):
    kw = dict(limit=1000, epsabs=1e-14, epsrel=1e-12)
    re, _ = integrate.quad(lambda p: f(p).real, -np.inf, np.inf, **kw)
    im, _ = integrate.quad(lambda p: f(p).imag, -np.inf, np.inf, **kw)
    return complex(re, im)


def hardy_quadrature(semigroup, z, w, xi, eta):
    """int_R <xi, (H - ip)(H + ip)^{-1} eta> / ((z - ip)(conj(w) - ip)) dp."""
    _check_half_plane(z, w)
    h = semigroup.eigs
    coeff = np.conj(np.asarray(xi, dtype=complex)) * np.asarray(eta, dtype=complex)
    wb = np.conj(w)
    total = 0j
    for hi, ci in zip(h, coeff):
        if ci == 0:
            continue
        total += ci * _complex_quad(lambda p, hi=hi: (hi - 1j * p) / (hi + 1j * p) / ((z - 1j * p) * (wb - 1j * p)))
    return total


def hardy_twisted_inner(semigroup, z, w, xi, eta):
    residue = hardy_residue(semigroup, z, w, xi, eta)
    quad = hardy_quadrature(semigroup, z, w, xi, eta)
    return {
        "residue_value": residue,
        "quadrature_value": quad,
        "rel_discrepancy": float(abs(residue - quad) / max(abs(residue), 1e-300)),
    }


def hardy_gram(semigroup, points, vectors, tol=1e-9):
    """Twisted Gram over pairs (z_k, xi_k) via the residue form."""
    n = len(points)
    g = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            g[i, j] = hardy_residue(semigroup, points[i], points[j], vectors[i], vectors[j])
    return g, psd_verdict(g, tol)


def r_kernel_gram(m, points, tol=1e-9):
    """Experimental: the kernel int m(p) / ((z - ip)(conj(w) - ip)) dp for scalar m.

    No claim is attached to the verdict; it only reports what the quadrature
    and eigensolver see for the supplied symbol.
    """
    _check_half_plane(*points)
    n = len(points)
    g = np.empty((n, n), dtype=complex)
    for i, z in enumerate(points):
        for j, w in enumerate(points):
            g[i, j] = _complex_quad(lambda p, z=z, w=w: m(p) / ((z - 1j * p) * (np.conj(w) - 1j * p)))
    g = 0.5 * (g + g.conj().T)
    return g, psd_verdict(g, tol, herm_tol=1e-8)


# spectral projection / fixed points --------------------------------------------


def spectral_projection_model(rho, horizons=(10.0, 100.0, 1000.0)):
    """nu density, ergodic limit rho({0}) and Cesaro averages of phi.

    phi(t) = sum_j w_j exp(-lambda_j t). The Cesaro average (1/T) int_0^T phi
    is computed both in closed form and by composite Gauss-Legendre.
    """
    if not isinstance(rho, SpectralMeasure):
        rho = SpectralMeasure(tuple(rho))
    if rho.is_matrix:
        raise OskitError("SCHEMA_ERROR", "spectral_projection_model takes scalar weights")
    positive = [(lam, w) for lam, w in rho.atoms if lam > 0]
    limit = float(sum(w for lam, w in rho.atoms if lam == 0))

    def nu_density(x):
        x = np.asarray(x, dtype=float)
        return sum(w * lam / (lam * lam + x * x) for lam, w in positive) / np.pi + 0 * x

    def cesaro_closed(T):
        return limit + sum(w * (1 - np.exp(-lam * T)) / (lam * T) for lam, w in positive)

    def cesaro_quadrature(T):
        nodes, weights = composite_rule(0.0, T, max(16, int(np.ceil(T))), 16)
        phi = limit + sum(w * np.exp(-lam * nodes) for lam, w in positive)
        return float(weights @ phi / T)

    rows = []
    for T in horizons:
        closed = cesaro_closed(T)
        rows.append({"T": float(T), "closed_form": float(closed), "quadrature": cesaro_quadrature(T), "deviation": abs(closed - limit)})
    return {"nu_density": nu_density, "ergodic_limit": limit, "cesaro": rows}
