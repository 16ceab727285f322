"""Finite atomic spectral measures with scalar or matrix weights."""

from dataclasses import dataclass

import numpy as np

from .errors import OskitError

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class SpectralMeasure:
    """Atoms ``(location, weight)``; weights are nonnegative scalars or PSD matrices.

    ``support`` is ``"nonneg"`` (all locations >= 0) or ``"real"``.
    """

    atoms: tuple
    support: str = "nonneg"

    def __post_init__(self):
        atoms = tuple((float(loc), _as_weight(w)) for loc, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if self.support not in ("nonneg", "real"):
            raise OskitError("SCHEMA_ERROR", f"unknown support tag {self.support!r}")
        for loc, w in atoms:
            if self.support == "nonneg" and loc < 0:
                raise OskitError("NEGATIVE_LOCATION", f"atom at {loc} < 0")
            if np.ndim(w) == 0:
                if w < -WEIGHT_TOL:
                    raise OskitError("MEASURE_NOT_POSITIVE", f"weight {w} < 0")
            else:
                if np.linalg.norm(w - w.conj().T) > WEIGHT_TOL * max(1.0, np.linalg.norm(w)):
                    raise OskitError("MEASURE_NOT_POSITIVE", "matrix weight is not hermitian")
                if np.linalg.eigvalsh(w)[0] < -WEIGHT_TOL:
                    raise OskitError("MEASURE_NOT_POSITIVE", "matrix weight is not PSD")

    @classmethod
    def from_pairs(cls, locations, weights, support="nonneg"):
        return cls(tuple(zip(locations, weights)), support)

    @property
    def locations(self):
        return np.array([loc for loc, _ in self.atoms])

    @property
    def is_matrix(self):
        return any(np.ndim(w) for _, w in self.atoms)

    def laplace(self, t):
        """sum_j w_j exp(-lambda_j |t|); a scalar or a matrix."""
        total = 0
        for loc, w in self.atoms:
            total = total + np.exp(-loc * abs(t)) * w
        return total

    def mass_at(self, loc):
        return sum((w for lam, w in self.atoms if lam == loc), 0.0)


def _as_weight(w):
    arr = np.asarray(w)
    if arr.ndim == 0:
        return float(arr.real) if np.isrealobj(arr) or arr.imag == 0 else complex(arr)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise OskitError("SCHEMA_ERROR", "matrix weights must be square")
    return arr.astype(complex)
