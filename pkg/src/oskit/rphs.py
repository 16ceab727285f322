"""Finite-dimensional reflection-positive Hilbert spaces.

An :class:`RPSpace` is a triple (E, theta, E+) with E = C^d, theta a unitary
involution and E+ given by a basis. The twisted form <x, theta y> on E+ yields
the OS quotient E^ = E+/N, and operators preserving E+ and N descend to it.
"""

from dataclasses import dataclass

import numpy as np

from .errors import OskitError
from .linalg import GramReport, Verdict, null_space, numerical_rank, projector, psd_verdict, range_basis

INVOLUTION_TOL = 1e-12
RANK_RTOL = 1e-10
EIGENSPACE_TOL = 1e-10


@dataclass(frozen=True)
class RPSpace:
    theta: np.ndarray
    plus_basis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=complex))
        basis = np.asarray(self.plus_basis, dtype=complex)
        if basis.ndim == 1:
            basis = basis[:, None]
        object.__setattr__(self, "plus_basis", basis)

    @property
    def dim(self):
        return self.theta.shape[0]

    @property
    def k(self):
        return self.plus_basis.shape[1]

    def validate(self):
        d = self.dim
        if self.theta.shape != (d, d) or self.plus_basis.shape[0] != d:
            raise OskitError("DOMAIN_VIOLATION", "theta and plus_basis shapes disagree")
        eye = np.eye(d)
        if np.linalg.norm(self.theta @ self.theta - eye) > INVOLUTION_TOL * max(1.0, d):
            raise OskitError("NON_INVOLUTIVE_THETA", "theta squared differs from the identity")
        if np.linalg.norm(self.theta.conj().T @ self.theta - eye) > INVOLUTION_TOL * max(1.0, d):
            raise OskitError("NON_INVOLUTIVE_THETA", "theta is not unitary")
        s = np.linalg.svd(self.plus_basis, compute_uv=False)
        if s.size == 0 or s[-1] <= RANK_RTOL * s[0]:
            raise OskitError("RANK_DEFICIENT_BASIS", "plus_basis does not have full column rank")
        return self


@dataclass(frozen=True)
class OSQuotient:
    rank: int
    qmap: np.ndarray
    null_basis: np.ndarray
    tol: float
    gram: np.ndarray
    # right inverse of qmap, used to push operators down to the quotient
    section: np.ndarray


def twisted_gram(space):
    b = space.plus_basis
    g = b.conj().T @ space.theta @ b
    return 0.5 * (g + g.conj().T)


def check_reflection_positive(space, tol=1e-9, strict=True):
    """PSD verdict for the twisted Gram matrix of E+.

    With ``strict=False`` a rank-deficient basis is reported as
    ``INDEFINITE_BASIS`` instead of raising.
    """
    try:
        space.validate()
    except OskitError as exc:
        if strict or exc.code != "RANK_DEFICIENT_BASIS":
            raise
        g = twisted_gram(space)
        eigs = np.linalg.eigvalsh(g)
        return GramReport(g.shape[0], float(eigs[0]), float(eigs[-1]), float(tol), Verdict.INDEFINITE_BASIS)
    return psd_verdict(twisted_gram(space), tol)


def theta_eigenspaces(theta):
    """Orthonormal bases of the +1 and -1 eigenspaces of ``theta``."""
    theta = np.asarray(theta, dtype=complex)
    eye = np.eye(theta.shape[0])
    plus = range_basis(0.5 * (eye + theta))
    minus = range_basis(0.5 * (eye - theta))
    return plus, minus


@dataclass(frozen=True)
class GraphSubspace:
    plus_basis: np.ndarray
    c_norm: float
    is_contraction: bool


def graph_subspace(theta, f_basis, c_op, tol=1e-12):
    """Basis of G(C) = {u + Cu : u in F}.

    ``f_basis`` spans F inside the +1 eigenspace of ``theta`` and ``c_op`` is a
    d x d matrix whose restriction to F maps into the -1 eigenspace. The
    resulting space is theta-positive iff ||C|F|| <= 1.
    """
    theta = np.asarray(theta, dtype=complex)
    f = np.asarray(f_basis, dtype=complex)
    c = np.asarray(c_op, dtype=complex)
    cf = c @ f
    scale = max(1.0, np.linalg.norm(f))
    if np.linalg.norm(theta @ f - f) > EIGENSPACE_TOL * scale:
        raise OskitError("EIGENSPACE_MISMATCH", "f_basis is not in the +1 eigenspace")
    if np.linalg.norm(theta @ cf + cf) > EIGENSPACE_TOL * max(1.0, np.linalg.norm(cf)):
        raise OskitError("EIGENSPACE_MISMATCH", "C does not map F into the -1 eigenspace")
    q = range_basis(f)
    c_norm = float(np.linalg.norm(c @ q, 2)) if q.shape[1] else 0.0
    return GraphSubspace(f + cf, c_norm, c_norm <= 1.0 + tol)


def _metric_scale(space, eigs):
    """Rank cutoff scale: the twisted Gram can be pure roundoff, so use ||B||^2 too."""
    return max(eigs[-1], np.linalg.norm(space.plus_basis, 2) ** 2)


def os_quotient(space, tol=1e-9):
    """OS quotient map on E+ coordinates.

    ``qmap`` is r x k with ``qmap^* qmap = G_theta`` up to the discarded
    eigenvalues, so <q x, q y> is the twisted inner product.
    """
    report = check_reflection_positive(space, tol)
    if not report.is_psd:
        raise OskitError("NOT_RP", f"twisted Gram has min eigenvalue {report.min_eig:.3e}")
    g = twisted_gram(space)
    eigs, vecs = np.linalg.eigh(g)
    keep = eigs > tol * _metric_scale(space, eigs)
    kept = eigs[keep]
    qmap = np.sqrt(kept)[:, None] * vecs[:, keep].conj().T
    section = vecs[:, keep] / np.sqrt(kept)[None, :]
    return OSQuotient(int(keep.sum()), qmap, vecs[:, ~keep], float(tol), g, section)


def restricted_norm(space, s):
    """Operator norm of ``s`` (E+ coordinates) measured in the metric of E."""
    m = space.plus_basis.conj().T @ space.plus_basis
    w, v = np.linalg.eigh(m)
    half = (v * np.sqrt(w)) @ v.conj().T
    half_inv = (v / np.sqrt(w)) @ v.conj().T
    return float(np.linalg.norm(half @ s @ half_inv, 2))


def os_transform(space, quotient, s):
    """The operator S^ on the quotient with S^ q = q S."""
    s = np.asarray(s, dtype=complex)
    q = quotient.qmap
    if quotient.rank == 0:
        return np.zeros((0, 0), dtype=complex)
    scale = max(1.0, np.linalg.norm(q, 2) * np.linalg.norm(s, 2))
    for n in quotient.null_basis.T:
        if np.linalg.norm(q @ (s @ n)) > 10 * quotient.tol * scale:
            raise OskitError("NULLSPACE_NOT_PRESERVED", "S moves N out of the null space")
    return q @ s @ quotient.section


def coordinates(space, vectors):
    """E+ coordinates of ambient vectors lying in E+ (least squares)."""
    x, *_ = np.linalg.lstsq(space.plus_basis, np.asarray(vectors, dtype=complex), rcond=None)
    return x


@dataclass(frozen=True)
class MarkovResult:
    is_markov: bool
    projector_residual: float
    quotient_defect: int
    criteria_agree: bool

    def as_dict(self):
        return {
            "is_markov": self.is_markov,
            "projector_residual": self.projector_residual,
            "quotient_defect": self.quotient_defect,
            "criteria_agree": self.criteria_agree,
        }


def markov_check(space, e0_basis, tol=1e-9):
    """Compare P+ P0 P- = P+ P- with surjectivity of q on E0."""
    space.validate()
    e0 = np.asarray(e0_basis, dtype=complex)
    if e0.ndim == 1:
        e0 = e0[:, None]
    theta = space.theta
    scale = max(1.0, np.linalg.norm(e0))
    if np.linalg.norm(theta @ e0 - e0) > EIGENSPACE_TOL * scale:
        raise OskitError("E0_NOT_FIXED", "theta does not fix e0_basis")
    p_plus = projector(space.plus_basis)
    if e0.shape[1] and np.linalg.norm(p_plus @ e0 - e0) > EIGENSPACE_TOL * scale:
        raise OskitError("E0_NOT_FIXED", "e0_basis is not contained in E+")
    p_minus = projector(theta @ space.plus_basis)
    p_zero = projector(e0) if e0.shape[1] else np.zeros_like(p_plus)
    residual = float(np.linalg.norm(p_plus @ p_zero @ p_minus - p_plus @ p_minus, 2))

    quotient = os_quotient(space, tol)
    if e0.shape[1]:
        images = quotient.qmap @ coordinates(space, range_basis(e0))
        image_rank = numerical_rank(images, 1e-6) if images.size else 0
    else:
        image_rank = 0
    defect = quotient.rank - image_rank
    by_projector = residual <= tol
    by_quotient = defect == 0
    return MarkovResult(by_projector and by_quotient, residual, int(defect), by_projector == by_quotient)


# random instances -----------------------------------------------------------


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def graph_space(rng, p, m, singular_values, scramble=True):
    """Random E+ = G(C) with prescribed singular values of C.

    Returns the space, an orthonormal basis of ker C inside E (which equals
    E+ cap Fix(theta)) and the ambient operator C.
    """
    d = p + m
    w = random_unitary(rng, d) if scramble else np.eye(d)
    theta = w @ np.diag(np.r_[np.ones(p), -np.ones(m)]) @ w.conj().T
    fplus = w[:, :p]
    fminus = w[:, p:]
    sv = np.zeros(p)
    sv[: len(singular_values)] = singular_values
    core = np.zeros((m, p), dtype=complex)
    r = min(m, p)
    core[:r, :r] = np.diag(sv[:r])
    core = random_unitary(rng, m) @ core @ random_unitary(rng, p)
    c_op = fminus @ core @ fplus.conj().T
    plus = fplus + c_op @ fplus
    ker = fplus @ null_space(core)
    if scramble:
        t = rng.normal(size=(p, p)) + 1j * rng.normal(size=(p, p)) + 3 * np.eye(p)
        plus = plus @ t
    return RPSpace(theta, plus), ker, c_op


def random_theta_symmetric(rng, space, tol=1e-9):
    """Random S on E+ coordinates with S* G = G S (hence S N in N)."""
    g = twisted_gram(space)
    eigs, u = np.linalg.eigh(g)
    keep = eigs > tol * _metric_scale(space, eigs)
    r, k = int(keep.sum()), len(eigs)
    order = np.r_[np.flatnonzero(keep), np.flatnonzero(~keep)]
    u = u[:, order]
    d1 = eigs[order][:r]
    h = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    h = 0.5 * (h + h.conj().T)
    block = np.zeros((k, k), dtype=complex)
    block[:r, :r] = (h * np.sqrt(d1)[None, :]) / np.sqrt(d1)[:, None]
    block[r:, :] = rng.normal(size=(k - r, k)) + 1j * rng.normal(size=(k - r, k))
    return u @ block @ u.conj().T


def twisted_unitary_model(rng, n_fixed, n_pairs):
    """theta-twisted unitary U (theta U theta = U^-1) with U E+ = E+.

    E = C^N + C^N with theta the swap and U = diag(A, A^-1). E+ is the graph of
    M with M A = A^-1 M: a PSD part where A is an involution and a null part
    where A rotates by conjugate phases. Everything is conjugated by a random
    unitary commuting with theta.
    """
    a_f = np.diag(rng.choice([-1.0, 1.0], size=n_fixed)).astype(complex)
    m_f = rng.normal(size=(n_fixed, n_fixed)) + 1j * rng.normal(size=(n_fixed, n_fixed))
    m_f = m_f @ m_f.conj().T
    # keep M block-diagonal in the eigenspaces of a_f so that M A = A M
    same = np.equal.outer(np.diag(a_f).real, np.diag(a_f).real)
    m_f = m_f * same
    blocks_a, blocks_m = [a_f], [m_f]
    for _ in range(n_pairs):
        alpha = rng.uniform(0.2, 2.8)
        mu = rng.normal() + 1j * rng.normal()
        blocks_a.append(np.diag([np.exp(1j * alpha), np.exp(-1j * alpha)]))
        blocks_m.append(np.array([[0, mu], [-np.conj(mu), 0]]))
    from scipy.linalg import block_diag

    a = block_diag(*blocks_a)
    m = block_diag(*blocks_m)
    n = a.shape[0]
    v = random_unitary(rng, n)
    a = v @ a @ v.conj().T
    m = v @ m @ v.conj().T
    theta = np.block([[np.zeros((n, n)), np.eye(n)], [np.eye(n), np.zeros((n, n))]])
    u = np.block([[a, np.zeros((n, n))], [np.zeros((n, n)), a.conj().T]])
    plus = np.vstack([np.eye(n), m])
    return RPSpace(theta, plus), u
