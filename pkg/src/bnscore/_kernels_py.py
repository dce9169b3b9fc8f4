"""Pure numpy versions of the compiled kernels."""

import numpy as np
from scipy.special import gammaln


def config_counts(data, variables, cards):
    data = np.asarray(data, dtype=np.int64)
    size = 1
    code = np.zeros(data.shape[0], dtype=np.int64)
    for v in variables:
        code = code * cards[v] + data[:, v]
        size *= cards[v]
    return np.bincount(code, minlength=size).astype(np.int64)


def lgamma_shift_sum(alpha, counts):
    alpha = np.asarray(alpha, dtype=float)
    counts = np.asarray(counts)
    hit = counts != 0
    return float(np.sum(gammaln(alpha[hit] + counts[hit]) - gammaln(alpha[hit])))


def bde_family(alpha, counts):
    alpha = np.asarray(alpha, dtype=float)
    counts = np.asarray(counts)
    return lgamma_shift_sum(alpha.ravel(), counts.ravel()) - lgamma_shift_sum(
        alpha.sum(axis=1), counts.sum(axis=1)
    )
