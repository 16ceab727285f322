"""Pure-Python twin of the compiled series kernels (same API and stopping rule)."""

import numpy as np


def hyp2f1_series(a, b, c, x, tol=1e-16, max_terms=10000):
    """Sum the 2F1 power series at real ``x``; returns ``(value, nterms)``.

    ``nterms`` is -1 when the term cap was reached before convergence.
    """
    a, b, c, x = complex(a), complex(b), complex(c), float(x)
    term = total = 1.0 + 0.0j
    quiet = 0
    for k in range(max_terms):
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0))
        term = term * ratio * x
        total += term
        if term == 0:
            return total, k + 1
        mag = abs(term.real) + abs(term.imag)
        tot = abs(total.real) + abs(total.imag)
        if mag <= tol * tot and abs(x) * (abs(ratio.real) + abs(ratio.imag)) < 1.0:
            quiet += 1
            if quiet >= 2:
                return total, k + 1
        else:
            quiet = 0
    return total, -1


def hyp2f1_series_many(a, b, c, xs, tol=1e-16, max_terms=10000):
    """Vectorized :func:`hyp2f1_series` over a float64 array of arguments."""
    xs = np.asarray(xs, dtype=np.float64)
    out = np.empty(xs.shape[0], dtype=np.complex128)
    counts = np.empty(xs.shape[0], dtype=np.int64)
    for i, x in enumerate(xs):
        out[i], counts[i] = hyp2f1_series(a, b, c, x, tol, max_terms)
    return out, counts
