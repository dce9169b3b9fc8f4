"""Normal-Wishart prior and the BGe marginal likelihood for continuous data.

``W`` is the precision matrix of the data. Under the prior,
``mu | W ~ N(mu0, a_mu * W)`` and ``W ~ Wishart(a_w, T0)`` with density
proportional to ``|W|^((a_w - n - 1)/2) exp(-tr(T0 W)/2)``, so ``T0`` plays
the role of a prior scatter matrix and ``E[W] = a_w * inv(T0)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, multigammaln

from ._linalg import check_pd, logdet_pd
from .dag import Dag
from .errors import DataError, DomainError, UsageError
from .transforms import (
    JointGaussianParams,
    RegressionParams,
    log_jacobian_gaussian,
    regression_to_joint,
)


@dataclass(frozen=True, eq=False)
class NormalWishartPrior:
    mu0: np.ndarray
    a_mu: float
    T0: np.ndarray
    a_w: float
    names: tuple | None = None

    def __post_init__(self):
        mu0 = np.asarray(self.mu0, dtype=float).reshape(-1)
        n = mu0.size
        T0 = np.asarray(self.T0, dtype=float)
        if T0.shape != (n, n):
            raise UsageError(f"T0 has shape {T0.shape}, expected {(n, n)}")
        a_mu, a_w = float(self.a_mu), float(self.a_w)
        if not a_mu > 0:
            raise DomainError(f"a_mu must be positive, got {a_mu}")
        if not a_w > n - 1:
            raise DomainError(f"a_w must exceed n - 1 = {n - 1}, got {a_w}")
        check_pd(T0, "scale matrix T0")
        names = None if self.names is None else tuple(self.names)
        if names is not None and len(names) != n:
            raise UsageError(f"{len(names)} names for {n} variables")
        object.__setattr__(self, "mu0", mu0)
        object.__setattr__(self, "T0", (T0 + T0.T) / 2)
        object.__setattr__(self, "a_mu", a_mu)
        object.__setattr__(self, "a_w", a_w)
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.mu0.size


@dataclass(frozen=True, eq=False)
class GaussianDataset:
    rows: np.ndarray
    names: tuple | None = None

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2:
            raise DataError(f"expected a 2-D array of cases, got {rows.ndim} dimensions")
        if not np.all(np.isfinite(rows)):
            r, c = np.argwhere(~np.isfinite(rows))[0]
            raise DataError(f"row {r}, column {c} is not finite")
        names = None if self.names is None else tuple(self.names)
        if names is not None and len(names) != rows.shape[1]:
            raise UsageError(f"{len(names)} names for {rows.shape[1]} columns")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "names", names)

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def head(self, count: int) -> "GaussianDataset":
        return GaussianDataset(self.rows[:count], self.names)


@dataclass(frozen=True, eq=False)
class GaussianSufficientStats:
    """Case count, sample mean and scatter matrix about the mean."""

    m: int
    xbar: np.ndarray
    S: np.ndarray


def sufficient_stats(data: GaussianDataset) -> GaussianSufficientStats:
    m, n = data.rows.shape
    if m == 0:
        return GaussianSufficientStats(0, np.zeros(n), np.zeros((n, n)))
    xbar = data.rows.mean(axis=0)
    centered = data.rows - xbar
    return GaussianSufficientStats(m, xbar, centered.T @ centered)


def _stats(data) -> GaussianSufficientStats:
    return data if isinstance(data, GaussianSufficientStats) else sufficient_stats(data)


def _posterior_scale(prior: NormalWishartPrior, stats: GaussianSufficientStats) -> np.ndarray:
    if stats.m == 0:
        return prior.T0.copy()
    diff = prior.mu0 - stats.xbar
    shrink = prior.a_mu * stats.m / (prior.a_mu + stats.m)
    Tm = prior.T0 + stats.S + shrink * np.outer(diff, diff)
    return (Tm + Tm.T) / 2


def posterior_update(prior: NormalWishartPrior, stats) -> NormalWishartPrior:
    """Conjugate update; the result is again normal-Wishart."""
    stats = _stats(stats)
    if stats.xbar.size != prior.n:
        raise UsageError(f"statistics over {stats.xbar.size} variables, prior over {prior.n}")
    m = stats.m
    mu_m = (prior.a_mu * prior.mu0 + m * stats.xbar) / (prior.a_mu + m)
    Tm = _posterior_scale(prior, stats)
    check_pd(Tm, "posterior scale matrix")
    return NormalWishartPrior(mu_m, prior.a_mu + m, Tm, prior.a_w + m, prior.names)


def log_c(l: int, alpha: float) -> float:
    """``sum_{i=1..l} lgamma((alpha + 1 - i) / 2)``."""
    if not alpha > l - 1:
        raise DomainError(f"log_c needs alpha > l - 1, got l={l}, alpha={alpha}")
    i = np.arange(1, l + 1)
    return float(np.sum(gammaln((alpha + 1 - i) / 2.0)))


def _check_aligned(data, prior: NormalWishartPrior, dag: Dag | None = None):
    n = data.n if isinstance(data, GaussianDataset) else data.xbar.size
    if n != prior.n:
        raise UsageError(f"data has {n} variables, prior has {prior.n}")
    if dag is not None:
        if dag.n != n:
            raise UsageError(f"DAG has {dag.n} nodes, data has {n} columns")
        names = [prior.names]
        if isinstance(data, GaussianDataset):
            names.append(data.names)
        for nm in names:
            if nm is not None and nm != dag.names:
                raise UsageError(f"variable names {list(nm)} differ from DAG {list(dag.names)}")


class _SubsetScorer:
    """Log marginal likelihood of data restricted to variable subsets.

    The posterior scale matrix is formed once; every subset reads its
    submatrix.
    """

    def __init__(self, prior: NormalWishartPrior, data):
        stats = _stats(data)
        _check_aligned(data, prior)
        self.prior = prior
        self.m = stats.m
        self.Tm = _posterior_scale(prior, stats)

    def __call__(self, subset) -> float:
        ys = sorted(set(int(v) for v in subset))
        l = len(ys)
        if l == 0 or self.m == 0:
            return 0.0
        prior, m = self.prior, self.m
        a_wy = prior.a_w - prior.n + l
        idx = np.ix_(ys, ys)
        return float(
            -0.5 * l * m * np.log(np.pi)
            + 0.5 * l * np.log(prior.a_mu / (prior.a_mu + m))
            + log_c(l, a_wy + m)
            - log_c(l, a_wy)
            + 0.5 * a_wy * logdet_pd(prior.T0[idx])
            - 0.5 * (a_wy + m) * logdet_pd(self.Tm[idx])
        )


def log_marginal_subset_gaussian(prior: NormalWishartPrior, data, subset) -> float:
    """Log probability of the data restricted to ``subset`` under the complete-DAG prior.

    ``data`` may be a :class:`GaussianDataset` or its sufficient statistics.
    """
    return _SubsetScorer(prior, data)(subset)


def family_scorer(prior: NormalWishartPrior, data):
    """Callable ``(node, parents) -> family term`` sharing one posterior scale matrix."""
    subset = _SubsetScorer(prior, data)

    def score(node, parents):
        parents = set(parents)
        return subset(parents | {node}) - subset(parents)

    return score


def log_score_bge(dag: Dag, data, prior: NormalWishartPrior) -> float:
    _check_aligned(data, prior, dag)
    score = family_scorer(prior, data)
    return float(sum(score(i, pa) for i, pa in enumerate(dag.parents)))


def log_sequential_predictive_gaussian(dag: Dag, prefix: GaussianDataset, case, prior: NormalWishartPrior) -> float:
    """Log predictive density of one case: score it alone under the prefix posterior."""
    posterior = posterior_update(prior, sufficient_stats(prefix))
    one = GaussianDataset(np.asarray(case, dtype=float).reshape(1, -1), prefix.names)
    return log_score_bge(dag, one, posterior)


# ---------------------------------------------------------------------------
# parameter densities


def log_wishart_density(W, a_w: float, T) -> float:
    """Log density of ``Wishart(a_w, T)`` in the ``exp(-tr(T W)/2)`` convention."""
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    return float(
        0.5 * a_w * logdet_pd(T)
        - 0.5 * a_w * n * np.log(2.0)
        - multigammaln(0.5 * a_w, n)
        + 0.5 * (a_w - n - 1) * logdet_pd(W)
        - 0.5 * np.trace(T @ W)
    )


def log_nw_density(prior: NormalWishartPrior, g: JointGaussianParams) -> float:
    """Log normal-Wishart density at ``(mu, W)``."""
    n = prior.n
    diff = g.mu - prior.mu0
    log_normal = (
        0.5 * (n * np.log(prior.a_mu) + logdet_pd(g.W))
        - 0.5 * n * np.log(2 * np.pi)
        - 0.5 * prior.a_mu * diff @ g.W @ diff
    )
    return float(log_normal + log_wishart_density(g.W, prior.a_w, prior.T0))


def log_nw_density_regression(prior: NormalWishartPrior, r: RegressionParams) -> float:
    """Density of ``(m, v, B)`` obtained by carrying the normal-Wishart through the joint map."""
    _, _, v_ordered = r.ordered()
    return log_nw_density(prior, regression_to_joint(r)) + log_jacobian_gaussian(v_ordered)


def log_nw_density_factored(prior: NormalWishartPrior, r: RegressionParams) -> float:
    """Same density written as a product of one factor per node.

    For the node at 1-based position ``i`` with predecessors ``P``:

    * ``m_i ~ N(mu0_i - b_i' mu0_P, precision a_mu / v_i)``
    * ``1 / v_i ~ Gamma(shape (a_w - n + i)/2, rate t/2)`` with ``t`` the
      Schur complement of ``T_PP`` in ``T``
    * ``b_i | v_i ~ N(inv(T_PP) T_Pi, v_i inv(T_PP))``
    """
    n = prior.n
    m, B, v = r.ordered()
    o = list(r.order)
    T = prior.T0[np.ix_(o, o)]
    mu0 = prior.mu0[o]
    total = 0.0
    for p in range(n):
        b = B[:p, p]
        prec = prior.a_mu / v[p]
        m0 = mu0[p] - b @ mu0[:p]
        total += 0.5 * np.log(prec / (2 * np.pi)) - 0.5 * prec * (m[p] - m0) ** 2

        T_PP = T[:p, :p]
        T_Pi = T[:p, p]
        beta = np.linalg.solve(T_PP, T_Pi) if p else np.zeros(0)
        schur = T[p, p] - T_Pi @ beta
        shape = 0.5 * (prior.a_w - n + p + 1)
        rate = 0.5 * schur
        total += shape * np.log(rate) - gammaln(shape) - (shape + 1) * np.log(v[p]) - rate / v[p]

        if p:
            dev = b - beta
            total += (
                -0.5 * p * np.log(2 * np.pi * v[p])
                + 0.5 * logdet_pd(T_PP)
                - 0.5 * dev @ T_PP @ dev / v[p]
            )
    return float(total)
