"""Gaussian processes, heat and Mehler semigroups, Feynman-Kac and Markov chains.

Random numbers come from numpy's Philox counter-based generator. A stream is
identified by (seed, block); block k uses ``Philox(seed).jumped(k)`` so that
paths can be generated in independent blocks and stay reproducible.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import OskitError
from .linalg import psd_verdict

BLOCK = 8192
MARKOV_TOL = 1e-10


def generator(seed, block=0):
    """Philox stream for ``block`` of the given 64-bit seed."""
    bitgen = np.random.Philox(int(seed) % 2**64)
    return np.random.Generator(bitgen.jumped(block) if block else bitgen)


# covariances ---------------------------------------------------------------------


def ou_covariance(lam, times):
    """e^{-lam |t_i - t_j|}."""
    if lam < 0:
        raise OskitError("DOMAIN_VIOLATION", "lambda must be nonnegative")
    t = np.asarray(times, dtype=float)
    return np.exp(-lam * np.abs(t[:, None] - t[None, :]))


def sqexp_covariance(lam, times):
    """e^{-lam (t_i - t_j)^2}."""
    if lam < 0:
        raise OskitError("DOMAIN_VIOLATION", "lambda must be nonnegative")
    t = np.asarray(times, dtype=float)
    return np.exp(-lam * (t[:, None] - t[None, :]) ** 2)


COVARIANCES = {"ou": ou_covariance, "sqexp": sqexp_covariance}


def markov_property_check(cov, split, tol=MARKOV_TOL):
    """Conditional cross-covariance of past and future given the present time ``split``."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0]
    if not 0 <= split < n:
        raise OskitError("DOMAIN_VIOLATION", "split index out of range")
    s00 = cov[split, split]
    if s00 <= 1e-14 * max(1.0, np.abs(cov).max()):
        raise OskitError("SINGULAR_PRESENT", "variance at the present time vanishes")
    past, future = np.arange(split), np.arange(split + 1, n)
    if len(past) == 0 or len(future) == 0:
        residual = 0.0
    else:
        cross = cov[np.ix_(past, future)] - np.outer(cov[past, split], cov[split, future]) / s00
        residual = float(np.linalg.norm(cross, 2))
    return {"cross_residual": residual, "is_markov_numerically": residual <= tol}


# Gaussian sampling ---------------------------------------------------------------


@dataclass(frozen=True)
class GaussianSpec:
    covariance: str
    lam: float
    times: tuple
    seed: int = 0

    def __post_init__(self):
        if self.covariance not in COVARIANCES:
            raise OskitError("SCHEMA_ERROR", f"unknown covariance {self.covariance!r}")
        times = tuple(float(t) for t in self.times)
        if list(times) != sorted(times):
            raise OskitError("DOMAIN_VIOLATION", "times must be sorted")
        object.__setattr__(self, "times", times)

    def matrix(self):
        return COVARIANCES[self.covariance](self.lam, self.times)


def covariance_root(cov, tol=1e-10):
    """Eigen square root L with L L^T = cov, tolerant of tiny negative eigenvalues."""
    report = psd_verdict(cov, tol)
    if not report.is_psd:
        raise OskitError("NOT_PSD", f"covariance has min eigenvalue {report.min_eig:.3e}")
    vals, vecs = np.linalg.eigh(0.5 * (cov + cov.T))
    return vecs * np.sqrt(np.clip(vals, 0.0, None))


def sample_gaussian(spec, n_paths, seed=None, z_limit=5.0):
    """Paths (n_paths x len(times)) and entrywise z-scores of the empirical covariance.

    The model mean is zero, so the empirical covariance is the sample mean of
    X_i X_j; its standard error is estimated from the same products.
    """
    seed = spec.seed if seed is None else seed
    cov = spec.matrix()
    root = covariance_root(cov)
    k = len(spec.times)
    blocks = []
    for b, start in enumerate(range(0, n_paths, BLOCK)):
        size = min(BLOCK, n_paths - start)
        blocks.append(generator(seed, b).standard_normal((size, k)) @ root.T)
    paths = np.vstack(blocks)
    products = paths[:, :, None] * paths[:, None, :]
    empirical = products.mean(axis=0)
    stderr = products.std(axis=0, ddof=1) / np.sqrt(n_paths)
    diff = empirical - cov
    z = np.where(stderr > 0, np.abs(diff) / np.where(stderr > 0, stderr, 1.0), np.where(np.abs(diff) > 1e-12, np.inf, 0.0))
    return {
        "paths": paths,
        "empirical_covariance": empirical,
        "standard_error": stderr,
        "max_z": float(z.max()),
        "within_tolerance": bool(z.max() <= z_limit),
    }


# heat semigroup --------------------------------------------------------------------


def uniform_spacing(grid):
    grid = np.asarray(grid, dtype=float)
    h = np.diff(grid)
    if len(grid) < 2 or np.max(np.abs(h - h[0])) > 1e-9 * abs(h[0]):
        raise OskitError("DOMAIN_VIOLATION", "grid must be uniform")
    return float(h[0])


def trapezoid_gauss_error(variance, h):
    """Leading aliasing error of the trapezoid rule for a Gaussian of this variance."""
    return 2.0 * np.exp(-2.0 * np.pi**2 * variance / h**2)


def heat_semigroup(f, grid, t, policy="periodic", tol=1e-10):
    """P_t f = f * gamma_t with gamma_t the centered Gaussian density of variance t.

    The generator is Delta / 2. ``policy`` is "periodic" (the grid is one
    period, endpoint excluded) or "zero" (f vanishes off the grid).
    """
    if t <= 0:
        raise OskitError("DOMAIN_VIOLATION", "t must be positive")
    grid = np.asarray(grid, dtype=float)
    h = uniform_spacing(grid)
    if trapezoid_gauss_error(t, h) > tol:
        raise OskitError("GRID_TOO_COARSE", f"spacing {h} too coarse for t = {t}")
    diff = grid[:, None] - grid[None, :]
    if policy == "periodic":
        period = h * len(grid)
        images = int(np.ceil(12 * np.sqrt(t) / period)) + 1
        kernel = sum(np.exp(-((diff + k * period) ** 2) / (2 * t)) for k in range(-images, images + 1))
    elif policy == "zero":
        kernel = np.exp(-(diff**2) / (2 * t))
    else:
        raise OskitError("SCHEMA_ERROR", f"unknown boundary policy {policy!r}")
    return (kernel * (h / np.sqrt(2 * np.pi * t))) @ np.asarray(f, dtype=float)


def heat_value(f, x, t, breaks=()):
    """(P_t f)(x) = int f(x + sqrt(t) z) phi(z) dz by adaptive quadrature."""
    if t <= 0:
        raise OskitError("DOMAIN_VIOLATION", "t must be positive")
    phi = lambda z: f(x + np.sqrt(t) * z) * np.exp(-0.5 * z * z) / np.sqrt(2 * np.pi)
    cuts = sorted({-12.0, 12.0, *[(b - x) / np.sqrt(t) for b in breaks if abs(b - x) < 12 * np.sqrt(t)]})
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        total += integrate.quad(phi, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    return total


def feynman_kac_mc(f, t, x, n_samples, seed, breaks=()):
    """Mean of f(x + sqrt(t) Z) against the heat-semigroup value."""
    if t <= 0:
        raise OskitError("DOMAIN_VIOLATION", "t must be positive")
    z = generator(seed).standard_normal(n_samples)
    values = np.asarray(f(x + np.sqrt(t) * z), dtype=float) * np.ones(n_samples)
    estimate = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(n_samples))
    analytic = heat_value(f, x, t, breaks)
    if stderr > 0:
        score = (estimate - analytic) / stderr
    else:
        score = 0.0 if abs(estimate - analytic) <= 1e-12 else float("inf")
    return {"mc_estimate": estimate, "analytic": analytic, "stderr": stderr, "z_score": float(score)}


# Mehler semigroup ------------------------------------------------------------------


def ground_state(x):
    return np.exp(-np.asarray(x, dtype=float) ** 2 / 4)


def mehler_step(f, grid, t, tol=1e-10):
    """e^{-tH} f for the oscillator Hamiltonian normalized to fix e^{-x^2/4}.

    Ground-state transform: (e^{-tH} f)(x) = Omega(x) int (f / Omega)(y)
    N(y; e^{-t} x, 1 - e^{-2t}) dy, an Ornstein-Uhlenbeck step conjugated by
    Omega(x) = e^{-x^2/4}. The exponents are combined before exponentiating.
    """
    if t <= 0:
        raise OskitError("DOMAIN_VIOLATION", "t must be positive")
    grid = np.asarray(grid, dtype=float)
    h = uniform_spacing(grid)
    v = 1.0 - np.exp(-2 * t)
    # the y-integrand is Gaussian with variance 2v / (2 - v) when f = Omega
    if trapezoid_gauss_error(2 * v / (2 - v), h) > tol:
        raise OskitError("GRID_TOO_COARSE", f"spacing {h} too coarse for t = {t}")
    x, y = grid[:, None], grid[None, :]
    expo = -x * x / 4 + y * y / 4 - (y - np.exp(-t) * x) ** 2 / (2 * v)
    kernel = np.exp(expo) * (h / np.sqrt(2 * np.pi * v))
    return kernel @ np.asarray(f, dtype=float)


# Markov chains -----------------------------------------------------------------------


@dataclass(frozen=True)
class MarkovMatrix:
    P: np.ndarray
    stationary: np.ndarray = None

    def __post_init__(self):
        p = np.asarray(self.P, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise OskitError("SCHEMA_ERROR", "P must be square")
        if np.any(p < 0) or np.max(np.abs(p.sum(axis=1) - 1)) > 1e-12:
            raise OskitError("DOMAIN_VIOLATION", "P must be a stochastic matrix")
        object.__setattr__(self, "P", p)
        pi = self.stationary
        if pi is None:
            vals, vecs = np.linalg.eig(p.T)
            pi = np.real(vecs[:, np.argmin(np.abs(vals - 1))])
            pi = pi / pi.sum()
        pi = np.asarray(pi, dtype=float)
        if np.any(pi < -1e-14) or np.max(np.abs(pi @ p - pi)) > 1e-12:
            raise OskitError("DOMAIN_VIOLATION", "stationary vector is not invariant")
        object.__setattr__(self, "stationary", pi)

    @property
    def detailed_balance(self):
        flow = self.stationary[:, None] * self.P
        return bool(np.max(np.abs(flow - flow.T)) <= 1e-12)


def random_reversible_chain(rng, k):
    """Chain from a random symmetric conductance matrix (always reversible)."""
    c = rng.uniform(0.1, 1.0, size=(k, k))
    c = c + c.T
    p = c / c.sum(axis=1, keepdims=True)
    return MarkovMatrix(p, c.sum(axis=1) / c.sum())


def monomial(chain, diagonals, exponents):
    """<1, A_1 P^{s_1} A_2 ... P^{s_{n-1}} A_n 1> in L^2(pi)."""
    vec = np.ones(len(chain.stationary))
    for k in range(len(diagonals) - 1, -1, -1):
        vec = diagonals[k] * vec
        if k > 0:
            vec = np.linalg.matrix_power(chain.P, exponents[k - 1]) @ vec
    return float(chain.stationary @ vec)


def pss_axiom_check(chain, powers, n_trials, seed, max_factors=5):
    """Randomized check of monomial positivity and self-adjointness of P^n in L^2(pi)."""
    if not chain.detailed_balance:
        raise OskitError("NOT_REVERSIBLE", "P is not in detailed balance with pi")
    rng = generator(seed)
    k = len(chain.stationary)
    worst = np.inf
    sym = 0.0
    for _ in range(n_trials):
        n = int(rng.integers(1, max_factors + 1))
        diagonals = [rng.uniform(0.0, 1.0, size=k) for _ in range(n)]
        exps = [int(rng.choice(powers)) for _ in range(n - 1)]
        worst = min(worst, monomial(chain, diagonals, exps))
        f, g = rng.normal(size=k), rng.normal(size=k)
        pn = np.linalg.matrix_power(chain.P, int(rng.choice(powers)))
        sym = max(sym, abs(chain.stationary @ ((pn @ f) * g) - chain.stationary @ (f * (pn @ g))))
    return {"min_monomial_value": float(worst), "self_adjoint_residual": float(sym), "pass": bool(worst >= -1e-12 and sym <= 1e-12)}


def pss_two_state_exhaustive(p, powers, max_factors=4):
    """Minimum monomial over all extreme choices A_i in {diag(1,0), diag(0,1)}.

    Monomials are multilinear in the A_i, so positivity on these extreme rays
    of the positive cone gives positivity for every tuple.
    """
    chain = MarkovMatrix(np.array([[1 - p, p], [p, 1 - p]]), np.array([0.5, 0.5]))
    units = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    worst = np.inf
    for n in range(1, max_factors + 1):
        for picks in np.ndindex(*(2,) * n):
            for exps in np.ndindex(*(len(powers),) * (n - 1)):
                value = monomial(chain, [units[i] for i in picks], [powers[e] for e in exps])
                worst = min(worst, value)
    return float(worst)
