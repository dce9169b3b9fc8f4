"""Numerical checks that joint priors induce independent local priors.

Two complementary measurements are taken at random parameter points:

``deviation``
    the density obtained by pushing the joint prior through the coordinate
    change (joint density plus log-Jacobian) minus the closed-form product
    of local densities;
``factorization defect``
    for a log density ``f`` and two points ``a``, ``b``, swapping one
    parameter block between them leaves ``f(a) + f(b)`` unchanged whenever
    ``f`` factorizes over blocks. The largest change over all blocks is
    reported. This needs no closed form, so it also applies to priors that
    are not Dirichlet or normal-Wishart.
"""

from __future__ import annotations

import numpy as np

from .discrete import (
    DirichletJointPrior,
    log_prior_density_conditionals,
    log_prior_density_via_joint,
)
from .errors import UsageError
from .gaussian import NormalWishartPrior, log_nw_density_factored, log_nw_density_regression
from .transforms import (
    ConditionalDiscreteParams,
    JointDiscreteParams,
    RegressionParams,
    conditionals_to_joint,
    log_jacobian_discrete,
    random_conditionals,
    random_regression,
)


def _swap_row(a: ConditionalDiscreteParams, b: ConditionalDiscreteParams, p, row):
    ta = [t.copy() for t in a.tables]
    tb = [t.copy() for t in b.tables]
    ta[p][row], tb[p][row] = b.tables[p][row], a.tables[p][row]
    return ConditionalDiscreteParams(a.order, tuple(ta)), ConditionalDiscreteParams(b.order, tuple(tb))


def discrete_factorization_defect(log_density, a: ConditionalDiscreteParams, b: ConditionalDiscreteParams) -> float:
    """Largest change of ``f(a) + f(b)`` when one conditional row is swapped."""
    if a.order != b.order:
        raise UsageError("points must share a variable order")
    base = log_density(a) + log_density(b)
    worst = 0.0
    for p, table in enumerate(a.tables):
        for row in np.ndindex(table.shape[:-1]):
            a2, b2 = _swap_row(a, b, p, row)
            worst = max(worst, abs(log_density(a2) + log_density(b2) - base))
    return worst


def _swap_node(a: RegressionParams, b: RegressionParams, node):
    ma, mb = a.m.copy(), b.m.copy()
    va, vb = a.v.copy(), b.v.copy()
    Ba, Bb = a.B.copy(), b.B.copy()
    ma[node], mb[node] = b.m[node], a.m[node]
    va[node], vb[node] = b.v[node], a.v[node]
    Ba[:, node], Bb[:, node] = b.B[:, node], a.B[:, node]
    return RegressionParams(a.order, ma, Ba, va), RegressionParams(b.order, mb, Bb, vb)


def gaussian_factorization_defect(log_density, a: RegressionParams, b: RegressionParams) -> float:
    """Largest change of ``f(a) + f(b)`` when one node's ``(m_i, v_i, b_i)`` is swapped."""
    if a.order != b.order:
        raise UsageError("points must share a variable order")
    base = log_density(a) + log_density(b)
    worst = 0.0
    for node in range(a.n):
        a2, b2 = _swap_node(a, b, node)
        worst = max(worst, abs(log_density(a2) + log_density(b2) - base))
    return worst


def check_dirichlet(prior: DirichletJointPrior, points: int, rng) -> dict:
    cards = prior.scheme.cardinalities
    deviation = 0.0
    defect = 0.0
    for _ in range(points):
        order = tuple(int(i) for i in rng.permutation(len(cards)))
        a = random_conditionals(cards, order, rng)
        b = random_conditionals(cards, order, rng)
        deviation = max(deviation, abs(log_prior_density_via_joint(prior, a) - log_prior_density_conditionals(prior, a)))
        defect = max(defect, discrete_factorization_defect(
            lambda c: log_prior_density_via_joint(prior, c), a, b))
    return {"max_deviation": deviation, "max_factorization_defect": defect}


def check_normal_wishart(prior: NormalWishartPrior, points: int, rng) -> dict:
    n = prior.n
    deviation = 0.0
    defect = 0.0
    for _ in range(points):
        order = tuple(int(i) for i in rng.permutation(n))
        a = random_regression(n, order, rng)
        b = random_regression(n, order, rng)
        deviation = max(deviation, abs(log_nw_density_regression(prior, a) - log_nw_density_factored(prior, a)))
        defect = max(defect, gaussian_factorization_defect(
            lambda r: log_nw_density_regression(prior, r), a, b))
    return {"max_deviation": deviation, "max_factorization_defect": defect}


# ---------------------------------------------------------------------------
# negative control: a prior on two binary variables that depends on the
# marginal of the first variable only, c / (theta_x (1 - theta_x)).


def log_marginal_only_density(joint: JointDiscreteParams) -> float:
    """Unnormalized log density ``-log theta_x - log(1 - theta_x)`` of a 2x2 joint table."""
    if joint.table.shape != (2, 2):
        raise UsageError("the marginal-only prior is defined for two binary variables")
    theta_x = float(joint.table[0].sum())
    return -np.log(theta_x) - np.log1p(-theta_x)


def marginal_only_conditional_density(c: ConditionalDiscreteParams) -> float:
    """The marginal-only prior carried to the conditionals of order ``c.order``."""
    return log_marginal_only_density(conditionals_to_joint(c)) + log_jacobian_discrete(c)


def check_marginal_only(points: int, rng, order=(1, 0)) -> dict:
    defect = 0.0
    worst_min = np.inf
    for _ in range(points):
        a = random_conditionals((2, 2), order, rng)
        b = random_conditionals((2, 2), order, rng)
        d = discrete_factorization_defect(marginal_only_conditional_density, a, b)
        defect = max(defect, d)
        worst_min = min(worst_min, d)
    return {"max_factorization_defect": defect, "min_factorization_defect": worst_min}
