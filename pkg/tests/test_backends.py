import os
import subprocess
import sys

import numpy as np

import oskit
from oskit import _pykernels, hyp


def test_backend_reported():
    assert oskit.BACKEND in ("cython", "python")


def test_pure_python_fallback_selected_by_env():
    env = dict(os.environ, OSKIT_PURE_PYTHON="1")
    code = "import oskit, oskit.hyp as h; print(oskit.BACKEND, repr(h.hyp2f1(1, 1, 2, 0.5)))"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True).stdout.split()
    assert out[0] == "python"
    assert complex(eval(out[1])) == hyp.hyp2f1(1, 1, 2, 0.5)


def test_fallback_matches_active_backend():
    xs = np.linspace(-0.5, 0.5, 51)
    a, b, c = 0.5 + 1.2j, 0.5 - 1.2j, 1.0
    vp, _ = _pykernels.hyp2f1_series_many(a, b, c, xs)
    active = hyp.hyp2f1_many(a, b, c, xs)
    assert np.allclose(vp, active, rtol=1e-15, atol=0)
