"""Root-free symmetric factorization used for determinants and PD checks."""

import numpy as np

from .errors import NotPositiveDefiniteError

PIVOT_TOL = 1e-12


def ldl(a, tol=PIVOT_TOL):
    """Factor symmetric ``a`` as ``L @ diag(d) @ L.T`` with ``L`` unit lower triangular.

    No pivoting and no square roots. A pivot at or below ``tol`` times the
    largest diagonal magnitude (floored at 1) raises
    :class:`NotPositiveDefiniteError`.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=1e-10, atol=1e-12):
        raise NotPositiveDefiniteError("matrix is not symmetric")
    L = np.eye(n)
    d = np.zeros(n)
    threshold = tol * max(1.0, float(np.max(np.abs(np.diag(a)))) if n else 1.0)
    for j in range(n):
        d[j] = a[j, j] - np.dot(L[j, :j] ** 2, d[:j])
        if not d[j] > threshold:
            raise NotPositiveDefiniteError(f"pivot {j} is {d[j]:.3g}; matrix is not positive definite")
        if j + 1 < n:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ (L[j, :j] * d[:j])) / d[j]
    return L, d


def logdet_pd(a) -> float:
    """Log-determinant of a symmetric positive definite matrix (sum of log pivots)."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0.0
    _, d = ldl(a)
    return float(np.sum(np.log(d)))


def check_pd(a, what="matrix"):
    try:
        ldl(a)
    except NotPositiveDefiniteError as exc:
        raise NotPositiveDefiniteError(f"{what}: {exc}") from None
