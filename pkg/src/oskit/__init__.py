"""Numerical toolkit for reflection positivity: kernels, dilations, KMS functions and paths."""

from ._accel import BACKEND
from .errors import OskitError
from .linalg import GramReport, Verdict, psd_verdict

__version__ = "0.1.0"

__all__ = ["BACKEND", "GramReport", "OskitError", "Verdict", "psd_verdict", "__version__"]
