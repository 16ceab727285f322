# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled power-series kernels for the Gauss hypergeometric function."""

import numpy as np
cimport numpy as cnp

from libc.math cimport fabs

cnp.import_array()


cdef double complex _series(double complex a, double complex b, double complex c,
                            double x, double tol, int max_terms, int *nterms) noexcept nogil:
    cdef double complex term = 1.0
    cdef double complex total = 1.0
    cdef double complex ratio
    cdef int k = 0
    cdef int quiet = 0
    cdef double mag, tot
    while k < max_terms:
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0))
        term = term * ratio * x
        total = total + term
        k += 1
        if term.real == 0.0 and term.imag == 0.0:
            nterms[0] = k
            return total
        mag = fabs(term.real) + fabs(term.imag)
        tot = fabs(total.real) + fabs(total.imag)
        # stop only once the ratio has settled below one, so a transient
        # small term near a + k = 0 does not end the sum early
        if mag <= tol * tot and fabs(x) * (fabs(ratio.real) + fabs(ratio.imag)) < 1.0:
            quiet += 1
            if quiet >= 2:
                nterms[0] = k
                return total
        else:
            quiet = 0
    nterms[0] = -1
    return total


def hyp2f1_series(a, b, c, double x, double tol=1e-16, int max_terms=10000):
    """Sum the 2F1 power series at real ``x``; returns ``(value, nterms)``.

    ``nterms`` is -1 when the term cap was reached before convergence.
    """
    cdef int nterms = 0
    cdef double complex value = _series(a, b, c, x, tol, max_terms, &nterms)
    return complex(value), nterms


def hyp2f1_series_many(a, b, c, cnp.ndarray[cnp.float64_t, ndim=1] xs,
                       double tol=1e-16, int max_terms=10000):
    """Vectorized :func:`hyp2f1_series` over a float64 array of arguments."""
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.empty(n, dtype=np.int64)
    cdef double complex ca = a, cb = b, cc = c
    cdef int nterms = 0
    with nogil:
        for i in range(n):
            out[i] = _series(ca, cb, cc, xs[i], tol, max_terms, &nterms)
            counts[i] = nterms
    return out, counts
