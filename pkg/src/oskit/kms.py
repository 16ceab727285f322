"""KMS positive definite functions, standard subspaces and thermal Green functions.

Forms on the complexification of a real space V are stored as complex
matrices in an orthonormal basis of V; ``conj`` is entrywise conjugation.
"""

from dataclasses import dataclass

import numpy as np

from .errors import OskitError
from .linalg import null_space, numerical_rank, psd_verdict

STRIP_TOL = 1e-12


# KMS measures ------------------------------------------------------------------


@dataclass(frozen=True)
class KMSMeasure:
    """mu = mu_+ + e^{beta lambda} mu_+(-.) with mu_+ atoms on [0, inf)."""

    beta: float
    plus_atoms: tuple

    def __post_init__(self):
        if self.beta <= 0:
            raise OskitError("DOMAIN_VIOLATION", "beta must be positive")
        atoms = []
        for loc, w in self.plus_atoms:
            w = np.asarray(w, dtype=complex)
            if loc < 0:
                raise OskitError("NEGATIVE_LOCATION", f"plus atom at {loc} < 0")
            if w.ndim == 2 and np.linalg.eigvalsh(0.5 * (w + w.conj().T))[0] < -1e-12:
                raise OskitError("MEASURE_NOT_POSITIVE", "weights must be PSD forms")
            if w.ndim == 0 and w.real < 0:
                raise OskitError("MEASURE_NOT_POSITIVE", "weights must be nonnegative")
            atoms.append((float(loc), w))
        object.__setattr__(self, "plus_atoms", tuple(atoms))

    def atoms(self):
        """Atoms of the assembled measure: (lam, W) and (-lam, e^{-beta lam} conj W)."""
        out = []
        for loc, w in self.plus_atoms:
            out.append((loc, w))
            out.append((-loc, np.exp(-self.beta * loc) * np.conj(w)))
        return out

    def symmetry_residual(self):
        """max over atoms of |mu(-lam) - e^{-beta lam} conj mu(lam)|."""
        table = {}
        for loc, w in self.atoms():
            table[loc] = table.get(loc, 0) + w
        worst = 0.0
        for loc, w in table.items():
            mirror = table.get(-loc, 0)
            worst = max(worst, float(np.max(np.abs(mirror - np.exp(-self.beta * loc) * np.conj(w)))))
        return worst


def kms_function(mu, z):
    """psi(z) = sum over atoms of e^{i z lam} W for 0 <= Im z <= beta."""
    z = complex(z)
    if z.imag < -STRIP_TOL or z.imag > mu.beta + STRIP_TOL:
        raise OskitError("OUTSIDE_STRIP", f"Im z = {z.imag} outside [0, {mu.beta}]")
    total = 0
    for loc, w in mu.atoms():
        total = total + np.exp(1j * z * loc) * w
    return total


def kms_residual(mu, ts):
    """max_t |psi(i beta + t) - conj psi(t)|."""
    return max(float(np.max(np.abs(kms_function(mu, 1j * mu.beta + t) - np.conj(kms_function(mu, t))))) for t in ts)


def kms_gram(mu, ts):
    """Block Gram psi(t_i - t_j) on real times."""
    blocks = [[np.atleast_2d(kms_function(mu, ti - tj)) for tj in ts] for ti in ts]
    return np.block(blocks)


# skew contractions -------------------------------------------------------------


@dataclass(frozen=True)
class SkewContraction:
    """Real skew-symmetric C with ||C|| < 1, diagonalized through iC."""

    C: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.C, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise OskitError("SCHEMA_ERROR", "C must be square")
        if np.linalg.norm(c + c.T) > 1e-12 * max(1.0, np.linalg.norm(c)):
            raise OskitError("DOMAIN_VIOLATION", "C is not skew-symmetric")
        object.__setattr__(self, "C", c)
        if self.norm >= 1.0:
            raise OskitError("NOT_STRICT_CONTRACTION", f"||C|| = {self.norm:.6g} >= 1")

    @property
    def norm(self):
        return float(np.linalg.norm(self.C, 2)) if self.C.size else 0.0

    @property
    def margin(self):
        return 1.0 - self.norm

    def eig(self):
        """Eigenvalues c_k in (-1, 1) and eigenvectors of the hermitian iC."""
        return np.linalg.eigh(1j * self.C)

    def polar(self, tol=1e-12):
        """(I, |C|) with C = I |C|; I is zero on ker C."""
        c, v = self.eig()
        absc = (v * np.abs(c)) @ v.conj().T
        sign = np.where(np.abs(c) > tol, np.sign(c), 0.0)
        # iI has eigenvalues sign(c_k); I = -i (iI)
        i_op = -1j * (v * sign) @ v.conj().T
        return i_op.real, absc.real


def rotation_contraction(mu, blocks=1):
    """C = mu times a direct sum of rotations by pi/2 (so |C| = mu)."""
    j = np.array([[0.0, -1.0], [1.0, 0.0]])
    return SkewContraction(np.kron(np.eye(blocks), mu * j))


def phi_from_contraction(model, beta, t):
    """(1 + iC)^{1 - t/beta} (1 - iC)^{t/beta} for t in [0, beta]."""
    if not -STRIP_TOL <= t <= beta + STRIP_TOL:
        raise OskitError("DOMAIN_VIOLATION", "t must lie in [0, beta]")
    s = min(max(t / beta, 0.0), 1.0)
    c, v = model.eig()
    vals = (1.0 + c) ** (1.0 - s) * (1.0 - c) ** s
    return (v * vals) @ v.conj().T


def phi_extended(model, beta, t):
    """2 beta periodic extension with phi(t + beta) = conj phi(t)."""
    r = np.mod(t, 2 * beta)
    if r <= beta:
        return phi_from_contraction(model, beta, r)
    return np.conj(phi_from_contraction(model, beta, r - beta))


# extension to the doubled circle -------------------------------------------------


def _split(c, beta, t, lam):
    """u+ and u- (for |c|) on [0, beta] in the contraction or the measure form."""
    s = t / beta
    a = abs(c)
    if lam is None:
        plus_side = (1 + a) ** (1 - s) * (1 - a) ** s
        minus_side = (1 - a) ** (1 - s) * (1 + a) ** s
    else:
        plus_side = np.exp(-t * lam) * (1 + a) + np.exp(-(beta - t) * lam) * (1 - a)
        minus_side = np.exp(-t * lam) * (1 - a) + np.exp(-(beta - t) * lam) * (1 + a)
    return 0.5 * (plus_side + minus_side), 0.5 * (plus_side - minus_side)


def u_pair(c, beta, t, lam=None):
    """Periodic extension: u+ has period beta, u- is beta-antiperiodic; both even."""
    r = np.mod(t, 2 * beta)
    sign = 1.0
    if r >= beta:
        r -= beta
        sign = -1.0
    up, um = _split(c, beta, r, lam)
    return up, sign * um


def f_value(model, beta, t, coset, lam=None, flip_identity=False):
    """f(t, tau^coset) = u+(t) + (iI)^coset u-(t) as a matrix.

    ``flip_identity`` replaces u- by -u- on the identity coset only (the
    negative control).
    """
    c, v = model.eig()
    vals = np.empty(len(c), dtype=complex)
    for k, ck in enumerate(c):
        up, um = u_pair(ck, beta, t, lam)
        e = 0.0 if abs(ck) < 1e-12 else np.sign(ck)
        factor = e if coset % 2 else (1.0 if e != 0 else 0.0)
        if flip_identity and coset % 2 == 0:
            factor = -factor
        vals[k] = up + factor * um
    return (v * vals) @ v.conj().T


def rp_extension_check(model, beta, grid, lam=None, group_grid=None, tol=1e-8, flip_identity=False):
    """PSD verdicts for the reflected kernel f(t_i + t_j, tau) on ``grid``
    (a subset of [0, beta/2]) and for the group kernel on the doubled grid.

    The group kernel is f(g_i^{-1} g_j) on the points (t, e) and (t, tau) of
    the semidirect product R x {e, tau}; as f(., tau^e) is even this equals
    f(t_i - t_j, tau^(e_i + e_j)). By default the group grid covers one full
    period [0, 2 beta).
    """
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < -1e-12) or np.any(grid > beta / 2 + 1e-12):
        raise OskitError("DOMAIN_VIOLATION", "grid must lie in [0, beta/2]")
    if group_grid is None:
        group_grid = np.linspace(0.0, 2 * beta, 2 * len(grid), endpoint=False)
    refl = np.block([[f_value(model, beta, ti + tj, 1, lam, flip_identity) for tj in grid] for ti in grid])
    pts = [(t, 0) for t in group_grid] + [(t, 1) for t in group_grid]
    grp = np.block([[f_value(model, beta, ti - tj, ei + ej, lam, flip_identity) for tj, ej in pts] for ti, ei in pts])
    return {
        "reflected_pd": psd_verdict(refl, tol, herm_tol=1e-10),
        "group_pd": psd_verdict(grp, tol, herm_tol=1e-10),
    }


def lambda_for_contraction(mu, beta):
    """lambda with e^{beta lambda} = (1 + mu)/(1 - mu)."""
    return float(np.log((1 + mu) / (1 - mu)) / beta)


# Matsubara coefficients --------------------------------------------------------


def matsubara_closed(lam, beta, n):
    """c_n = (1 - (-1)^n e^{-beta lam})/(1 + e^{-beta lam}) (2 lam/beta)/(lam^2 + (n pi/beta)^2)."""
    n = np.asarray(n)
    q = np.exp(-beta * lam)
    parity = np.where(n % 2 == 0, (1 - q) / (1 + q), 1.0)
    return parity * (2 * lam / beta) / (lam**2 + (n * np.pi / beta) ** 2)


def _matsubara_aliased(lam, beta, n, samples):
    """Sum over j of c_{n + j N}: what an N-point DFT of u sees exactly."""
    n = np.asarray(n)
    q = np.exp(-beta * lam)
    parity = np.where(n % 2 == 0, (1 - q) / (1 + q), 1.0)
    x = 2 * lam * beta / samples
    lattice = beta / (samples * lam) * np.sinh(x) / (np.cosh(x) - np.cos(2 * np.pi * n / samples))
    return parity * (2 * lam / beta) * lattice


def u_lambda(lam, beta, t, sign):
    """Normalized thermal functions u^{+/-}_lambda, extended to period 2 beta."""
    r = np.mod(t, 2 * beta)
    flip = np.where(r >= beta, sign, 1.0)
    r = np.where(r >= beta, r - beta, r)
    return flip * (np.exp(-r * lam) + sign * np.exp(-(beta - r) * lam)) / (1 + np.exp(-beta * lam))


def matsubara(lam, beta, n_max=32, samples=4096):
    """Closed-form coefficients and an FFT check of u^{+/-}_lambda.

    Coefficients use chi_n(t) = e^{i pi n t / beta} on [0, 2 beta]. An
    N-point DFT returns the Poisson sum of the true coefficients over n + jN,
    which is itself in closed form; ``fft_check`` compares against that and
    ``raw_deviation`` against the unaliased c_n.
    """
    if lam <= 0 or beta <= 0:
        raise OskitError("DOMAIN_VIOLATION", "lambda and beta must be positive")
    t = 2 * beta * np.arange(samples) / samples
    plus = np.fft.fft(u_lambda(lam, beta, t, 1.0)) / samples
    minus = np.fft.fft(u_lambda(lam, beta, t, -1.0)) / samples
    ns = np.arange(-n_max, n_max + 1)
    idx = np.mod(ns, samples)
    discrete = np.where(ns % 2 == 0, plus[idx], minus[idx]).real
    leak = float(max(np.max(np.abs(np.where(ns % 2 == 0, minus[idx], plus[idx]))), 0.0))
    closed = matsubara_closed(lam, beta, ns)
    aliased = _matsubara_aliased(lam, beta, ns, samples)
    return {
        "n": ns,
        "c_n": closed,
        "c_plus": float(np.tanh(beta * lam / 2) * 2 * lam / beta),
        "c_minus": float(2 * lam / beta),
        "fft_check": float(np.max(np.abs(discrete - aliased) / aliased)),
        "raw_deviation": float(np.max(np.abs(discrete - closed) / closed)),
        "parity_leak": leak,
        "samples": samples,
    }


# standard subspaces --------------------------------------------------------------


@dataclass(frozen=True)
class StandardSubspaceModel:
    """Modular data: paired eigenvalues (delta, 1/delta) plus ``fixed`` ones."""

    pairs: tuple
    fixed: int = 0

    def __post_init__(self):
        pairs = tuple(float(d) for d in self.pairs)
        if any(d <= 0 for d in pairs):
            raise OskitError("DOMAIN_VIOLATION", "modular eigenvalues must be positive")
        object.__setattr__(self, "pairs", pairs)

    def operators(self):
        """(Delta diagonal, permutation P) with J = P o conj."""
        deltas = []
        for d in self.pairs:
            deltas += [d, 1.0 / d]
        deltas += [1.0] * self.fixed
        n = len(deltas)
        perm = np.zeros((n, n))
        for k in range(len(self.pairs)):
            perm[2 * k, 2 * k + 1] = perm[2 * k + 1, 2 * k] = 1.0
        for k in range(2 * len(self.pairs), n):
            perm[k, k] = 1.0
        return np.array(deltas), perm


@dataclass(frozen=True)
class StandardSubspace:
    basis: np.ndarray
    contraction: SkewContraction
    deltas: np.ndarray
    pairing_residual: float
    real_rank: int


def standard_subspace_roundtrip(model, rng=None):
    """Real orthonormal basis of V = Fix(J Delta^{1/2}) and C with Im<x, y> = <x, Cy>_V."""
    deltas, perm = model.operators()
    n = len(deltas)
    # J Delta J = P Delta P on real diagonal Delta
    if np.max(np.abs(perm @ np.diag(deltas) @ perm - np.diag(1.0 / deltas))) > 1e-12:
        raise OskitError("MODULAR_RELATION_VIOLATED", "J Delta J differs from Delta^{-1}")
    pd = perm @ np.diag(np.sqrt(deltas))
    # S(x + iy) = P D^{1/2} x - i P D^{1/2} y as a real-linear map
    s_real = np.block([[pd, np.zeros((n, n))], [np.zeros((n, n)), -pd]])
    basis_real = null_space(s_real - np.eye(2 * n), 1e-10)
    if basis_real.shape[1] != n:
        raise OskitError("MODULAR_RELATION_VIOLATED", "Fix(S) does not have real dimension n")
    x, y = basis_real[:n], basis_real[n:]
    c = x.T @ y - y.T @ x
    basis = x + 1j * y
    times_i = np.vstack([-y, x])
    real_rank = numerical_rank(np.hstack([basis_real, times_i]))
    rng = np.random.default_rng(0) if rng is None else rng
    a, b = rng.normal(size=n), rng.normal(size=n)
    xi, eta = basis @ a, basis @ b
    residual = abs(np.vdot(xi, eta).imag - a @ c @ b)
    return StandardSubspace(basis, SkewContraction(0.5 * (c - c.T)), deltas, float(residual), real_rank)


def modular_pairing_residual(sub, beta, ts):
    """max_t || B* Delta^{t/beta} B - phi~(t) || on the model."""
    worst = 0.0
    for t in ts:
        lhs = sub.basis.conj().T @ (sub.deltas[:, None] ** (t / beta) * sub.basis)
        worst = max(worst, float(np.max(np.abs(lhs - phi_from_contraction(sub.contraction, beta, t)))))
    return worst


def two_dim_contraction_norm(delta):
    """|(delta^{1/2} - delta^{-1/2}) / (delta^{1/2} + delta^{-1/2})|."""
    r = np.sqrt(delta)
    return abs((r - 1 / r) / (r + 1 / r))
