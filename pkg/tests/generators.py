"""Seeded data generators shared by the test modules."""

import numpy as np

from bnscore.dag import topological_order
from bnscore.discrete import DiscreteDataset
from bnscore.gaussian import GaussianDataset


def sample_discrete(dag, cards, cpts, m, rng):
    """Forward-sample ``m`` cases; ``cpts[i]`` has one row per parent configuration."""
    rows = np.zeros((m, dag.n), dtype=np.int64)
    for i in topological_order(dag):
        config = np.zeros(m, dtype=np.int64)
        for p in dag.parents[i]:
            config = config * cards[p] + rows[:, p]
        cum = np.cumsum(np.asarray(cpts[i]), axis=1)[config]
        u = rng.random(m)
        rows[:, i] = (u[:, None] > cum[:, :-1]).sum(axis=1)
    return DiscreteDataset(cards, rows, dag.names)


def random_cpts(dag, cards, rng, concentration=1.0):
    return [
        rng.dirichlet(np.full(cards[i], concentration), size=int(np.prod([cards[p] for p in pa])) if pa else 1)
        for i, pa in enumerate(dag.parents)
    ]


def random_discrete_data(cards, m, rng, names=None):
    rows = np.column_stack([rng.integers(0, r, size=m) for r in cards]) if m else np.zeros((0, len(cards)))
    return DiscreteDataset(cards, rows, names)


def random_gaussian_data(n, m, rng, names=None):
    L = np.tril(rng.normal(size=(n, n))) + 2 * np.eye(n)
    return GaussianDataset(rng.normal(size=(m, n)) @ L.T + rng.normal(size=n), names)
