"""Scoring priors from an assessed prior Bayesian network.

The discrete route multiplies the network's CPTs into a joint table and
pairs it with one effective sample size. The Gaussian route reads the mean
and covariance implied by a linear-regression network and sets the
normal-Wishart hyperparameters so that the prior predictive (a multivariate
t) has exactly those moments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .dag import Dag, topological_order
from .discrete import DirichletJointPrior
from .errors import DomainError, PositivityError, UsageError
from .gaussian import NormalWishartPrior
from .transforms import DiscreteScheme, JointDiscreteParams, RegressionParams, regression_to_joint

CPT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DiscretePriorNetwork:
    """``cpts[i]`` is a ``(q_i, r_i)`` array, rows in mixed-radix parent order."""

    dag: Dag
    scheme: DiscreteScheme
    cpts: tuple

    def __post_init__(self):
        scheme = self.scheme
        if not isinstance(scheme, DiscreteScheme):
            scheme = DiscreteScheme(scheme)
        if scheme.n != self.dag.n:
            raise UsageError(f"{scheme.n} cardinalities for {self.dag.n} nodes")
        if len(self.cpts) != self.dag.n:
            raise UsageError(f"{len(self.cpts)} CPTs for {self.dag.n} nodes")
        cpts = []
        for i, (cpt, pa) in enumerate(zip(self.cpts, self.dag.parents)):
            shape = (scheme.n_configs(pa), scheme.cardinalities[i])
            cpt = np.asarray(cpt, dtype=float)
            if cpt.size != shape[0] * shape[1]:
                raise UsageError(f"CPT of {self.dag.names[i]!r} has {cpt.size} entries, expected {shape}")
            cpt = cpt.reshape(shape)
            if not np.all(cpt > 0):
                raise PositivityError(f"CPT of {self.dag.names[i]!r} has a non-positive entry")
            if np.max(np.abs(cpt.sum(axis=1) - 1.0)) > CPT_TOL:
                raise DomainError(f"CPT rows of {self.dag.names[i]!r} do not sum to 1")
            cpts.append(cpt)
        object.__setattr__(self, "scheme", scheme)
        object.__setattr__(self, "cpts", tuple(cpts))


@dataclass(frozen=True, eq=False)
class GaussianPriorNetwork:
    """Linear-regression network. ``B[j, i]`` is nonzero only for arcs ``j -> i``."""

    dag: Dag
    intercepts: np.ndarray
    B: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        n = self.dag.n
        m = np.asarray(self.intercepts, dtype=float).reshape(n)
        B = np.asarray(self.B, dtype=float).reshape(n, n)
        v = np.asarray(self.variances, dtype=float).reshape(n)
        if not np.all(v > 0):
            raise DomainError("variances must be positive")
        for j, i in zip(*np.nonzero(B)):
            if not self.dag.has_arc(j, i):
                raise UsageError(f"coefficient {self.dag.names[j]}->{self.dag.names[i]} has no arc")
        object.__setattr__(self, "intercepts", m)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "variances", v)

    def regression(self) -> RegressionParams:
        return RegressionParams(tuple(topological_order(self.dag)), self.intercepts, self.B, self.variances)


def network_joint(net: DiscretePriorNetwork) -> np.ndarray:
    """Dense joint table ``prod_i theta(x_i | pa_i)`` over every configuration."""
    cards = net.scheme.cardinalities
    n = len(cards)
    table = np.ones(cards)
    for i, (cpt, pa) in enumerate(zip(net.cpts, net.dag.parents)):
        family = sorted(pa + (i,))
        local = cpt.reshape([cards[p] for p in pa] + [cards[i]])
        local = np.moveaxis(local, -1, family.index(i))
        shape = [cards[v] if v in family else 1 for v in range(n)]
        table = table * local.reshape(shape)
    return table


def discrete_prior_from_network(net: DiscretePriorNetwork, alpha) -> DirichletJointPrior:
    table = network_joint(net)
    return DirichletJointPrior(alpha, JointDiscreteParams(table / table.sum()), net.dag.names)


def network_moments(net: GaussianPriorNetwork):
    """Mean and covariance of the network's joint normal distribution."""
    r = net.regression()
    m, B, v = r.ordered()
    n = m.size
    # x = m + B' x + e in position order
    A = np.eye(n) - B.T
    mean_o = solve_triangular(A, m, lower=True)
    L = solve_triangular(A, np.diag(np.sqrt(v)), lower=True)
    cov_o = L @ L.T
    position = np.argsort(r.order)
    return mean_o[position], cov_o[np.ix_(position, position)]


def gaussian_prior_from_network(net: GaussianPriorNetwork, a_mu, a_w) -> NormalWishartPrior:
    """Normal-Wishart prior whose predictive mean and covariance match the network."""
    n = net.dag.n
    a_mu, a_w = float(a_mu), float(a_w)
    if not a_mu > 0:
        raise DomainError(f"a_mu must be positive, got {a_mu}")
    if not a_w > n + 1:
        raise DomainError(f"a_w must exceed n + 1 = {n + 1} for the predictive covariance to exist")
    joint = regression_to_joint(net.regression())
    _, cov = network_moments(net)
    T0 = a_mu * (a_w - n - 1) / (a_mu + 1) * cov
    return NormalWishartPrior(joint.mu, a_mu, (T0 + T0.T) / 2, a_w, net.dag.names)


def prior_moments(prior: NormalWishartPrior):
    """Predictive mean and covariance of one case under a normal-Wishart prior."""
    n = prior.n
    if not prior.a_w > n + 1:
        raise DomainError(f"covariance undefined unless a_w > n + 1 = {n + 1}")
    cov = (prior.a_mu + 1) / prior.a_mu / (prior.a_w - n - 1) * prior.T0
    return prior.mu0.copy(), cov
