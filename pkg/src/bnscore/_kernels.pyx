# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting and log-gamma kernels.

Same signatures and results as ``_kernels_py``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport lgamma

cnp.import_array()


def config_counts(const cnp.int64_t[:, ::1] data, variables, cards):
    """Counts of each joint configuration of ``variables`` (mixed radix, first most significant)."""
    cdef Py_ssize_t m = data.shape[0]
    cdef Py_ssize_t k = len(variables)
    cdef cnp.int64_t[::1] cols = np.asarray(variables, dtype=np.int64)
    cdef cnp.int64_t[::1] radix = np.asarray([cards[v] for v in variables], dtype=np.int64)
    cdef Py_ssize_t size = 1
    cdef Py_ssize_t a
    for a in range(k):
        size *= radix[a]
    out = np.zeros(size, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = out
    cdef Py_ssize_t row, code
    for row in range(m):
        code = 0
        for a in range(k):
            code = code * radix[a] + data[row, cols[a]]
        counts[code] += 1
    return out


def lgamma_shift_sum(const double[::1] alpha, const cnp.int64_t[::1] counts):
    """Sum of lgamma(alpha + N) - lgamma(alpha); entries with N == 0 contribute 0."""
    cdef Py_ssize_t i
    cdef double total = 0.0
    for i in range(alpha.shape[0]):
        if counts[i] != 0:
            total += lgamma(alpha[i] + counts[i]) - lgamma(alpha[i])
    return total


def bde_family(const double[:, ::1] alpha, const cnp.int64_t[:, ::1] counts):
    """Log marginal likelihood of one family from its hyperparameters and counts (both q x r)."""
    cdef Py_ssize_t q = alpha.shape[0]
    cdef Py_ssize_t r = alpha.shape[1]
    cdef Py_ssize_t j, k
    cdef double a_row, total = 0.0
    cdef cnp.int64_t n_row
    for j in range(q):
        a_row = 0.0
        n_row = 0
        for k in range(r):
            a_row += alpha[j, k]
            n_row += counts[j, k]
            if counts[j, k] != 0:
                total += lgamma(alpha[j, k] + counts[j, k]) - lgamma(alpha[j, k])
        if n_row != 0:
            total += lgamma(a_row) - lgamma(a_row + n_row)
    return total
