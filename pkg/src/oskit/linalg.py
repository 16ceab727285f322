"""Hermitian eigen-verdicts and small linear-algebra helpers."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import OskitError


class Verdict(str, Enum):
    PSD = "PSD"
    NOT_PSD = "NOT_PSD"
    # reported instead of raising when a caller asks for a non-strict check
    # on a degenerate basis
    INDEFINITE_BASIS = "INDEFINITE_BASIS"


@dataclass(frozen=True)
class GramReport:
    size: int
    min_eig: float
    max_eig: float
    tol: float
    verdict: Verdict

    @property
    def is_psd(self):
        return self.verdict is Verdict.PSD

    def as_dict(self):
        return {
            "size": self.size,
            "min_eig": self.min_eig,
            "max_eig": self.max_eig,
            "tol": self.tol,
            "verdict": self.verdict.value,
        }


def hermitian_residual(matrix):
    """Relative distance of ``matrix`` from its adjoint."""
    m = np.asarray(matrix)
    scale = max(np.linalg.norm(m), 1e-300)
    return float(np.linalg.norm(m - m.conj().T) / scale)


def psd_verdict(matrix, tol=1e-8, herm_tol=1e-12, return_eigs=False):
    """Classify a hermitian matrix as PSD or NOT_PSD.

    The matrix is PSD when its smallest eigenvalue is at least
    ``-tol * max(1, max_eig)``. A full dense eigendecomposition is used.
    """
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise OskitError("NOT_HERMITIAN", f"expected a square matrix, got shape {m.shape}")
    if m.size == 0:
        raise OskitError("NOT_HERMITIAN", "empty matrix")
    if hermitian_residual(m) > herm_tol:
        raise OskitError("NOT_HERMITIAN", f"residual {hermitian_residual(m):.3e}")
    m = 0.5 * (m + m.conj().T)
    eigs = np.linalg.eigvalsh(m)
    lo, hi = float(eigs[0]), float(eigs[-1])
    ok = lo >= -tol * max(1.0, hi)
    report = GramReport(m.shape[0], lo, hi, float(tol), Verdict.PSD if ok else Verdict.NOT_PSD)
    if return_eigs:
        return report, eigs
    return report


def range_basis(vectors, rtol=1e-10):
    """Orthonormal basis of the column span, dropping directions below ``rtol``."""
    v = np.atleast_2d(np.asarray(vectors))
    if v.size == 0:
        return np.zeros((v.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(v, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return u[:, :0]
    return u[:, s > rtol * s[0]]


def numerical_rank(matrix, rtol=1e-10):
    s = np.linalg.svd(np.atleast_2d(matrix), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def projector(basis):
    """Orthogonal projector onto the span of the columns of ``basis``."""
    q = range_basis(basis)
    return q @ q.conj().T


def null_space(matrix, rtol=1e-10):
    """Orthonormal basis of the kernel, using the singular value cutoff ``rtol``."""
    m = np.atleast_2d(matrix)
    _, s, vh = np.linalg.svd(m)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > rtol * scale))
    return vh[rank:].conj().T
