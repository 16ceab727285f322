"""Backend selection for the series kernels.

The compiled extension is used when it imports; setting the environment
variable ``OSKIT_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

import os

if os.environ.get("OSKIT_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as kernels

    BACKEND = "python"
else:
    try:
        from . import _ckernels as kernels

        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as kernels

        BACKEND = "python"

hyp2f1_series = kernels.hyp2f1_series
hyp2f1_series_many = kernels.hyp2f1_series_many

__all__ = ["BACKEND", "hyp2f1_series", "hyp2f1_series_many"]
