"""Compare the compiled and pure-Python 2F1 series kernels.

Run with ``python3 benchmarks/bench_kernels.py [--points N] [--repeat R]``.
"""

import argparse
import timeit

import numpy as np

from oskit import _pykernels

try:
    from oskit import _ckernels
except ImportError:
    _ckernels = None

CASES = {
    "psi(n=3,m=1)": (1.0, 1.0, 1.5),
    "imaginary lambda": (0.5 + 1.2j, 0.5 - 1.2j, 1.0),
    "generic": (1.3, -0.4, 2.7),
}


def bench(module, a, b, c, xs, repeat):
    times = timeit.repeat(lambda: module.hyp2f1_series_many(a, b, c, xs), number=1, repeat=repeat)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--points", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    xs = np.linspace(-0.5, 0.5, args.points)
    if _ckernels is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'case':<18} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8} {'max rel diff':>13}")
    for name, (a, b, c) in CASES.items():
        tp = bench(_pykernels, a, b, c, xs, args.repeat)
        if _ckernels is None:
            print(f"{name:<18} {tp:11.4f}")
            continue
        tc = bench(_ckernels, a, b, c, xs, args.repeat)
        vp, _ = _pykernels.hyp2f1_series_many(a, b, c, xs)
        vc, _ = _ckernels.hyp2f1_series_many(a, b, c, xs)
        diff = np.max(np.abs(vp - vc) / np.abs(vp))
        print(f"{name:<18} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f} {diff:13.2e}")


if __name__ == "__main__":
    main()
