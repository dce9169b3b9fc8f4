"""Coordinate changes between complete-structure parameters and joint parameters.

Two families are covered:

* discrete: conditional tables of a complete DAG in a given variable order
  <-> one joint probability table over all configurations;
* Gaussian: linear-regression parameters ``(m, B, v)`` of a complete DAG
  <-> mean vector and precision matrix ``(mu, W)``.

Each direction comes with the log-Jacobian of the map so that densities can
be carried from one parameterization to the other.

Orders are permutations of variable indices: ``order[p]`` is the variable at
position ``p``. Joint quantities are always indexed by variable, never by
position.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from ._linalg import PIVOT_TOL, check_pd, ldl
from .errors import CapacityError, DomainError, PositivityError, UsageError

DEFAULT_MAX_STATES = 2 ** 20
PROB_TOL = 1e-12


def max_states() -> int:
    """State-space cap; ``BNSCORE_MAX_STATES`` overrides the default 2**20."""
    raw = os.environ.get("BNSCORE_MAX_STATES")
    if raw is None:
        return DEFAULT_MAX_STATES
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"BNSCORE_MAX_STATES must be an integer, got {raw!r}") from None
    if value < 1:
        raise UsageError("BNSCORE_MAX_STATES must be positive")
    return value


def _check_order(order, n):
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(n)):
        raise UsageError(f"{list(order)} is not a permutation of 0..{n - 1}")
    return order


# ---------------------------------------------------------------------------
# discrete


@dataclass(frozen=True)
class DiscreteScheme:
    """Number of states ``r_i >= 2`` of each variable."""

    cardinalities: tuple

    def __post_init__(self):
        cards = tuple(int(r) for r in self.cardinalities)
        for i, r in enumerate(cards):
            if r < 2:
                raise DomainError(f"variable {i} has {r} states; at least 2 are required")
        object.__setattr__(self, "cardinalities", cards)
        if self.n_states > max_states():
            raise CapacityError(
                f"joint state space has {self.n_states} configurations, cap is {max_states()}"
            )

    @property
    def n(self) -> int:
        return len(self.cardinalities)

    @property
    def n_states(self) -> int:
        return math.prod(self.cardinalities)

    def n_configs(self, variables) -> int:
        """``q`` for a set of variables: the product of their cardinalities."""
        return math.prod(self.cardinalities[v] for v in variables)


@dataclass(frozen=True, eq=False)
class JointDiscreteParams:
    """Strictly positive joint table; axis ``i`` is variable ``i``."""

    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        if not np.all(table > 0):
            raise PositivityError("joint table has a non-positive entry")
        if abs(table.sum() - 1.0) > PROB_TOL * max(1, table.size):
            raise DomainError(f"joint table sums to {table.sum()!r}, not 1")
        object.__setattr__(self, "table", table)

    @property
    def scheme(self) -> DiscreteScheme:
        return DiscreteScheme(self.table.shape)

    def marginal(self, variables) -> np.ndarray:
        """Marginal table over ``variables`` (axes in increasing variable order)."""
        keep = set(variables)
        drop = tuple(i for i in range(self.table.ndim) if i not in keep)
        return self.table.sum(axis=drop)


@dataclass(frozen=True, eq=False)
class ConditionalDiscreteParams:
    """Conditional tables of a complete DAG whose arcs follow ``order``.

    ``tables[p]`` has one axis per variable ``order[0..p]`` (in that order);
    its last axis is the distribution of ``order[p]`` given the predecessors.
    """

    order: tuple
    tables: tuple

    def __post_init__(self):
        n = len(self.tables)
        order = _check_order(self.order, n)
        tables = []
        for p, t in enumerate(self.tables):
            t = np.asarray(t, dtype=float)
            if t.ndim != p + 1:
                raise UsageError(f"table {p} should have {p + 1} axes, has {t.ndim}")
            if p and t.shape[:-1] != tables[-1].shape:
                raise UsageError(f"table {p} shape {t.shape} does not extend {tables[-1].shape}")
            if not np.all(t > 0):
                raise PositivityError(f"conditional table {p} has a non-positive entry")
            if np.max(np.abs(t.sum(axis=-1) - 1.0)) > PROB_TOL * t.shape[-1]:
                raise DomainError(f"conditional table {p} rows do not sum to 1")
            tables.append(t)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "tables", tuple(tables))

    @property
    def n(self) -> int:
        return len(self.order)

    @property
    def cardinalities(self) -> tuple:
        """Cardinalities by position in ``order``."""
        return self.tables[-1].shape if self.tables else ()


def conditionals_to_joint(c: ConditionalDiscreteParams) -> JointDiscreteParams:
    """Multiply the chain of conditionals into the joint table."""
    t = c.tables[0]
    for table in c.tables[1:]:
        t = t[..., None] * table
    position = np.argsort(c.order)
    table = np.transpose(t, position)
    # rows summing to 1 within tolerance can leave a drift of a few ulps
    return JointDiscreteParams(table / table.sum())


def joint_to_conditionals(j: JointDiscreteParams, order) -> ConditionalDiscreteParams:
    """Factor a joint table into the conditionals of the complete DAG along ``order``."""
    n = j.table.ndim
    order = _check_order(order, n)
    t = np.transpose(j.table, order)
    tables = []
    prefix = None
    for p in range(n):
        marg = t.sum(axis=tuple(range(p + 1, n))) if p + 1 < n else t
        if np.any(marg <= 0):
            raise PositivityError(f"zero marginal over the first {p + 1} variables")
        cond = marg if prefix is None else marg / prefix[..., None]
        # renormalize rows to kill summation drift
        tables.append(cond / cond.sum(axis=-1, keepdims=True))
        prefix = marg
    return ConditionalDiscreteParams(order, tuple(tables))


def log_jacobian_discrete(c: ConditionalDiscreteParams) -> float:
    """Log |d(joint) / d(conditionals)| for the free coordinates of both sides.

    Each conditional ``theta(x_p | x_0..x_{p-1})`` at position ``p < n-1``
    enters with exponent ``prod(r after p) - 1``.
    """
    cards = c.cardinalities
    total = 0.0
    for p in range(c.n - 1):
        exponent = math.prod(cards[p + 1:]) - 1
        total += exponent * float(np.sum(np.log(c.tables[p])))
    return total


# ---------------------------------------------------------------------------
# Gaussian


@dataclass(frozen=True, eq=False)
class RegressionParams:
    """Linear-regression parameters of a complete Gaussian DAG along ``order``.

    Indexed by variable: ``m[i]`` intercept and ``v[i]`` conditional variance
    of variable ``i``; ``B[j, i]`` is the coefficient of ``x_j`` in the
    regression for ``x_i`` and is zero unless ``j`` precedes ``i`` in
    ``order``.
    """

    order: tuple
    m: np.ndarray
    B: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float).reshape(-1)
        n = m.size
        order = _check_order(self.order, n)
        B = np.asarray(self.B, dtype=float).reshape(n, n)
        v = np.asarray(self.v, dtype=float).reshape(n)
        if not np.all(v > 0):
            raise DomainError(f"conditional variances must be positive, got {v.tolist()}")
        position = np.argsort(order)
        ahead = position[:, None] < position[None, :]
        if np.any(B[~ahead] != 0):
            raise UsageError("B has a coefficient from a variable that does not precede its child")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.m.size

    def ordered(self):
        """``(m, B, v)`` re-indexed by position in ``order``."""
        o = list(self.order)
        return self.m[o], self.B[np.ix_(o, o)], self.v[o]


@dataclass(frozen=True, eq=False)
class JointGaussianParams:
    """Mean vector and symmetric positive definite precision matrix."""

    mu: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        W = np.asarray(self.W, dtype=float)
        if W.shape != (mu.size, mu.size):
            raise UsageError(f"W has shape {W.shape}, expected {(mu.size, mu.size)}")
        check_pd(W, "precision matrix")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "W", W)

    @property
    def n(self) -> int:
        return self.mu.size


def regression_to_joint(r: RegressionParams) -> JointGaussianParams:
    """Mean by forward substitution and precision by the bordered recursion."""
    m, B, v = r.ordered()
    n = r.n
    mu = np.zeros(n)
    W = np.zeros((0, 0))
    for p in range(n):
        b = B[:p, p]
        mu[p] = m[p] + b @ mu[:p]
        grown = np.empty((p + 1, p + 1))
        grown[:p, :p] = W + np.outer(b, b) / v[p]
        grown[:p, p] = grown[p, :p] = -b / v[p]
        grown[p, p] = 1.0 / v[p]
        W = grown
    position = np.argsort(r.order)
    return JointGaussianParams(mu[position], W[np.ix_(position, position)])


def joint_to_regression(g: JointGaussianParams, order) -> RegressionParams:
    """Recover ``(m, B, v)`` along ``order`` from ``(mu, W)``.

    ``W`` permuted to ``order`` equals ``U diag(1/v) U'`` with ``U = I - B``
    unit upper triangular; that is an LDL' factorization taken from the last
    position backwards.
    """
    n = g.n
    order = _check_order(order, n)
    o = list(order)
    Wo = g.W[np.ix_(o, o)]
    L, d = ldl(Wo[::-1, ::-1], tol=PIVOT_TOL)
    U = L[::-1, ::-1]
    v_o = 1.0 / d[::-1]
    B_o = np.triu(-U, k=1)
    mu_o = g.mu[o]
    m_o = mu_o - B_o.T @ mu_o
    position = np.argsort(order)
    return RegressionParams(
        order,
        m_o[position],
        B_o[np.ix_(position, position)],
        v_o[position],
    )


def log_jacobian_gaussian(v) -> float:
    """Log |dW / d(v, B)| for variances listed in the working order.

    The position-``p`` variance (1-based) carries exponent ``-(p + 1)``.
    The mean map ``mu -> m`` has unit Jacobian and contributes nothing.
    """
    v = np.asarray(v, dtype=float)
    if not np.all(v > 0):
        raise DomainError("variances must be positive")
    exponents = np.arange(2, v.size + 2)
    return float(-np.sum(exponents * np.log(v)))


# ---------------------------------------------------------------------------
# random points, used by the consistency harness


def random_conditionals(cardinalities, order, rng, concentration=1.0) -> ConditionalDiscreteParams:
    """Random point with every conditional row drawn from a symmetric Dirichlet."""
    cards_o = [cardinalities[i] for i in order]
    tables = []
    for p, r in enumerate(cards_o):
        shape = tuple(cards_o[:p])
        t = rng.dirichlet(np.full(r, concentration), size=shape or None)
        t = np.clip(t, 1e-9, None)
        tables.append(t / t.sum(axis=-1, keepdims=True))
    return ConditionalDiscreteParams(tuple(order), tuple(tables))


def random_regression(n, order, rng, scale=1.0) -> RegressionParams:
    o = list(order)
    m = rng.normal(0.0, scale, size=n)
    v = rng.uniform(0.3, 2.0, size=n)
    B = np.zeros((n, n))
    for p in range(n):
        for q in range(p):
            B[o[q], o[p]] = rng.normal(0.0, 0.7)
    return RegressionParams(tuple(order), m, B, v)
