"""Dirichlet joint prior and the BDe marginal likelihood for discrete data.

All Dirichlet hyperparameters of every family come from a single joint
table ``alpha * p(x_1, ..., x_n)``: the hyperparameters for node ``i`` under
parent configuration ``j`` and value ``k`` are the joint table marginalized
onto ``{i} | parents`` and scaled by ``alpha``.

Parent configurations are numbered in mixed radix over the parents sorted by
variable index, most significant first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import kernels
from .dag import Dag
from .errors import DataError, DomainError, UsageError
from .transforms import (
    ConditionalDiscreteParams,
    DiscreteScheme,
    JointDiscreteParams,
    conditionals_to_joint,
    log_jacobian_discrete,
)


@dataclass(frozen=True, eq=False)
class DirichletJointPrior:
    """Effective sample size ``alpha`` plus a strictly positive joint table."""

    alpha: float
    joint: JointDiscreteParams
    names: tuple | None = None

    def __post_init__(self):
        alpha = float(self.alpha)
        if not (alpha > 0 and np.isfinite(alpha)):
            raise DomainError(f"effective sample size must be positive, got {self.alpha!r}")
        joint = self.joint
        if not isinstance(joint, JointDiscreteParams):
            joint = JointDiscreteParams(joint)
        names = None if self.names is None else tuple(self.names)
        if names is not None and len(names) != joint.table.ndim:
            raise UsageError(f"{len(names)} names for a {joint.table.ndim}-variable table")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "joint", joint)
        object.__setattr__(self, "names", names)

    @classmethod
    def uniform(cls, alpha, cardinalities, names=None) -> "DirichletJointPrior":
        """Uniform joint table; the BDeu special case."""
        scheme = DiscreteScheme(cardinalities)
        table = np.full(scheme.cardinalities, 1.0 / scheme.n_states)
        return cls(alpha, JointDiscreteParams(table), names)

    @property
    def scheme(self) -> DiscreteScheme:
        return self.joint.scheme

    @property
    def n(self) -> int:
        return self.joint.table.ndim


@dataclass(frozen=True, eq=False)
class DiscreteDataset:
    """Complete sample, one row per case, cell values in ``[0, r_i)``."""

    scheme: DiscreteScheme
    rows: np.ndarray
    names: tuple | None = None

    def __post_init__(self):
        scheme = self.scheme
        if not isinstance(scheme, DiscreteScheme):
            scheme = DiscreteScheme(scheme)
        rows = np.ascontiguousarray(np.asarray(self.rows, dtype=np.int64).reshape(-1, scheme.n))
        cards = np.asarray(scheme.cardinalities, dtype=np.int64)
        if rows.size:
            bad = (rows < 0) | (rows >= cards[None, :])
            if bad.any():
                r, c = np.argwhere(bad)[0]
                raise DataError(f"row {r}, column {c}: value {rows[r, c]} outside [0, {cards[c]})")
        names = None if self.names is None else tuple(self.names)
        if names is not None and len(names) != scheme.n:
            raise UsageError(f"{len(names)} names for {scheme.n} columns")
        object.__setattr__(self, "scheme", scheme)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "names", names)

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.scheme.n

    def head(self, count: int) -> "DiscreteDataset":
        return DiscreteDataset(self.scheme, self.rows[:count], self.names)

    def tail(self, start: int) -> "DiscreteDataset":
        return DiscreteDataset(self.scheme, self.rows[start:], self.names)


@dataclass(frozen=True, eq=False)
class CountTable:
    """``counts[j, k]``: cases with parent configuration ``j`` and child value ``k``."""

    node: int
    parents: tuple
    counts: np.ndarray

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)


def _family(node, parent_set, n):
    parents = tuple(sorted(int(p) for p in parent_set))
    if not 0 <= node < n or any(not 0 <= p < n for p in parents):
        raise UsageError(f"node {node} or parents {parents} out of range for {n} variables")
    if node in parents:
        raise UsageError(f"node {node} listed among its own parents")
    return node, parents


def _check_aligned(data: DiscreteDataset, prior: DirichletJointPrior, dag: Dag | None = None):
    if data.scheme.cardinalities != prior.scheme.cardinalities:
        raise UsageError(
            f"data cardinalities {data.scheme.cardinalities} differ from prior "
            f"{prior.scheme.cardinalities}"
        )
    if dag is not None:
        if dag.n != data.n:
            raise UsageError(f"DAG has {dag.n} nodes, data has {data.n} columns")
        for names in (data.names, prior.names):
            if names is not None and names != dag.names:
                raise UsageError(f"variable names {list(names)} differ from DAG {list(dag.names)}")


def counts(data: DiscreteDataset, node, parent_set) -> CountTable:
    node, parents = _family(node, parent_set, data.n)
    cards = data.scheme.cardinalities
    flat = kernels.config_counts(data.rows, parents + (node,), cards)
    q = data.scheme.n_configs(parents)
    return CountTable(node, parents, flat.reshape(q, cards[node]))


def alpha_family(prior: DirichletJointPrior, node, parent_set) -> np.ndarray:
    """Hyperparameters ``alpha_ijk`` as a ``(q, r)`` array; rows sum to ``alpha_ij``."""
    node, parents = _family(node, parent_set, prior.n)
    variables = sorted(parents + (node,))
    marg = prior.joint.marginal(variables)
    marg = np.moveaxis(marg, variables.index(node), -1)
    cards = prior.scheme.cardinalities
    q = prior.scheme.n_configs(parents)
    return np.ascontiguousarray(prior.alpha * marg.reshape(q, cards[node]))


def log_marginal_subset_discrete(prior: DirichletJointPrior, data: DiscreteDataset, subset) -> float:
    """Log probability of the data restricted to ``subset`` under the complete-DAG prior."""
    _check_aligned(data, prior)
    variables = sorted(set(int(v) for v in subset))
    if not variables or data.m == 0:
        return 0.0
    a = np.ascontiguousarray(prior.alpha * prior.joint.marginal(variables).ravel())
    n_y = kernels.config_counts(data.rows, variables, data.scheme.cardinalities)
    return float(
        gammaln(prior.alpha) - gammaln(prior.alpha + data.m) + kernels.lgamma_shift_sum(a, n_y)
    )


def family_score(prior: DirichletJointPrior, data: DiscreteDataset, node, parent_set) -> float:
    """One family's term of the BDe score."""
    table = counts(data, node, parent_set)
    return float(kernels.bde_family(alpha_family(prior, node, parent_set), table.counts))


def log_score_bde(dag: Dag, data: DiscreteDataset, prior: DirichletJointPrior) -> float:
    """Log marginal likelihood of a complete sample, summed family by family."""
    _check_aligned(data, prior, dag)
    return float(sum(family_score(prior, data, i, pa) for i, pa in enumerate(dag.parents)))


def log_score_bde_ratio(dag: Dag, data: DiscreteDataset, prior: DirichletJointPrior) -> float:
    """Same quantity as :func:`log_score_bde` via subset marginal ratios."""
    _check_aligned(data, prior, dag)
    total = 0.0
    for i, pa in enumerate(dag.parents):
        total += log_marginal_subset_discrete(prior, data, set(pa) | {i})
        total -= log_marginal_subset_discrete(prior, data, pa)
    return total


def log_sequential_predictive(dag: Dag, prefix: DiscreteDataset, case, prior: DirichletJointPrior) -> float:
    """Log predictive probability of one complete ``case`` given the cases in ``prefix``."""
    _check_aligned(prefix, prior, dag)
    case = np.asarray(case, dtype=np.int64)
    cards = prior.scheme.cardinalities
    total = 0.0
    for i, pa in enumerate(dag.parents):
        a = alpha_family(prior, i, pa)
        n_ijk = counts(prefix, i, pa).counts
        j = 0
        for p in pa:
            j = j * cards[p] + int(case[p])
        k = int(case[i])
        total += np.log(a[j, k] + n_ijk[j, k]) - np.log(a[j].sum() + n_ijk[j].sum())
    return float(total)


def posterior(prior: DirichletJointPrior, data: DiscreteDataset) -> DirichletJointPrior:
    """Dirichlet joint prior after adding the full-configuration counts of ``data``."""
    _check_aligned(data, prior)
    cards = prior.scheme.cardinalities
    n_full = kernels.config_counts(data.rows, list(range(prior.n)), cards).reshape(cards)
    total = prior.alpha + data.m
    table = (prior.alpha * prior.joint.table + n_full) / total
    return DirichletJointPrior(total, JointDiscreteParams(table / table.sum()), prior.names)


def _dirichlet_logpdf(theta, a, axis=-1):
    """Dirichlet log density over the last axis, summed over any leading axes."""
    norm = gammaln(a.sum(axis=axis)) - gammaln(a).sum(axis=axis)
    return float(np.sum(norm) + np.sum((a - 1.0) * np.log(theta)))


def log_joint_dirichlet_density(prior: DirichletJointPrior, joint: JointDiscreteParams) -> float:
    """Log density of the joint table under ``Dirichlet(alpha * p(x))``."""
    a = prior.alpha * prior.joint.table.ravel()
    return _dirichlet_logpdf(joint.table.ravel(), a)


def log_prior_density_conditionals(prior: DirichletJointPrior, c: ConditionalDiscreteParams) -> float:
    """Log density of a complete-DAG parameter point as a product of local Dirichlets.

    The row for configuration ``x_0..x_{p-1}`` of the position-``p`` variable
    gets hyperparameters ``alpha * p(x_0, ..., x_p)``.
    """
    if tuple(prior.scheme.cardinalities[i] for i in c.order) != tuple(c.cardinalities):
        raise UsageError("conditional tables do not match the prior's cardinalities")
    table = np.transpose(prior.alpha * prior.joint.table, c.order)
    total = 0.0
    for p in range(c.n):
        a = table.sum(axis=tuple(range(p + 1, c.n))) if p + 1 < c.n else table
        total += _dirichlet_logpdf(c.tables[p], a)
    return total


def log_prior_density_via_joint(prior: DirichletJointPrior, c: ConditionalDiscreteParams) -> float:
    """Joint Dirichlet density at the mapped point plus the log-Jacobian of the map."""
    return log_joint_dirichlet_density(prior, conditionals_to_joint(c)) + log_jacobian_discrete(c)
