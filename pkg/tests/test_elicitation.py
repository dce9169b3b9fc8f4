import itertools

import numpy as np
import pytest

from bnscore.dag import Dag
from bnscore.discrete import alpha_family
from bnscore.elicitation import (
    DiscretePriorNetwork,
    GaussianPriorNetwork,
    discrete_prior_from_network,
    gaussian_prior_from_network,
    network_joint,
    network_moments,
    prior_moments,
)
from bnscore.errors import CapacityError, DomainError, PositivityError, UsageError


def random_discrete_net(dag, cards, rng):
    cpts = []
    for i, pa in enumerate(dag.parents):
        q = int(np.prod([cards[p] for p in pa])) if pa else 1
        cpts.append(rng.dirichlet(np.ones(cards[i]) * 2, size=q))
    return DiscretePriorNetwork(dag, cards, tuple(cpts))


def random_gaussian_net(dag, rng):
    n = dag.n
    B = np.zeros((n, n))
    for i, pa in enumerate(dag.parents):
        for j in pa:
            B[j, i] = rng.normal()
    return GaussianPriorNetwork(dag, rng.normal(size=n), B, rng.uniform(0.3, 3, size=n))


class TestDiscrete:
    def test_independent_uniform(self):
        dag = Dag.empty(("X", "Y"))
        net = DiscretePriorNetwork(dag, (2, 2), ([[0.5, 0.5]], [[0.5, 0.5]]))
        prior = discrete_prior_from_network(net, 4)
        np.testing.assert_allclose(prior.joint.table, 0.25)
        np.testing.assert_allclose(alpha_family(prior, 1, [0]), 1.0)
        np.testing.assert_allclose(alpha_family(prior, 0, [1]), 1.0)
        np.testing.assert_allclose(alpha_family(prior, 0, []), 2.0)

    def test_chain_product(self):
        dag = Dag.from_arcs(("X", "Y"), [(0, 1)])
        net = DiscretePriorNetwork(dag, (2, 2), ([[0.8, 0.2]], [[0.9, 0.1], [0.1, 0.9]]))
        joint = discrete_prior_from_network(net, 10).joint.table
        assert joint[0, 0] == pytest.approx(0.72, abs=1e-15)
        assert joint.sum() == pytest.approx(1.0)

    def test_parent_configuration_order(self):
        # mixed radix over sorted parents, first parent most significant
        dag = Dag.from_arcs(("A", "B", "C"), [(0, 2), (1, 2)])
        rng = np.random.default_rng(0)
        net = random_discrete_net(dag, (2, 3, 2), rng)
        table = network_joint(net)
        for a, b, c in itertools.product(range(2), range(3), range(2)):
            want = net.cpts[0][0, a] * net.cpts[1][0, b] * net.cpts[2][a * 3 + b, c]
            assert table[a, b, c] == pytest.approx(want, rel=1e-14)

    def test_forward_sampling(self):
        rng = np.random.default_rng(1)
        dag = Dag.from_arcs(("A", "B", "C"), [(0, 1), (0, 2), (1, 2)])
        cards = (2, 3, 2)
        net = random_discrete_net(dag, cards, rng)
        draws = 10 ** 6
        u = rng.random((draws, 3))
        a = (u[:, 0][:, None] > np.cumsum(net.cpts[0][0])[None, :-1]).sum(axis=1)
        b = (u[:, 1][:, None] > np.cumsum(net.cpts[1], axis=1)[a][:, :-1]).sum(axis=1)
        c = (u[:, 2][:, None] > np.cumsum(net.cpts[2], axis=1)[a * 3 + b][:, :-1]).sum(axis=1)
        freq = np.zeros(cards)
        np.add.at(freq, (a, b, c), 1)
        freq /= draws
        p = discrete_prior_from_network(net, 1.0).joint.table
        se = np.sqrt(p * (1 - p) / draws)
        assert np.all(np.abs(freq - p) < 5 * se)

    def test_zero_entry(self):
        dag = Dag.empty(("X",))
        with pytest.raises(PositivityError):
            DiscretePriorNetwork(dag, (2,), ([[1.0, 0.0]],))

    def test_rows_must_sum_to_one(self):
        with pytest.raises(DomainError):
            DiscretePriorNetwork(Dag.empty(("X",)), (2,), ([[0.5, 0.6]],))

    def test_wrong_shape(self):
        with pytest.raises(UsageError):
            DiscretePriorNetwork(Dag.empty(("X",)), (2,), ([[0.2, 0.3, 0.5]],))

    def test_capacity(self, monkeypatch):
        monkeypatch.setenv("BNSCORE_MAX_STATES", "8")
        names = tuple("ABCD")
        with pytest.raises(CapacityError):
            DiscretePriorNetwork(Dag.empty(names), (2, 2, 2, 2), tuple([[0.5, 0.5]] for _ in names))


class TestGaussian:
    def test_single_node(self):
        net = GaussianPriorNetwork(Dag.empty(("X",)), [0.0], [[0.0]], [1.0])
        prior = gaussian_prior_from_network(net, 1.0, 3.0)
        np.testing.assert_allclose(prior.mu0, [0.0])
        np.testing.assert_allclose(prior.T0, [[0.5]], rtol=1e-15)

    def test_independent_network_gives_diagonal(self):
        net = GaussianPriorNetwork(Dag.empty(("X", "Y", "Z")), [1, 2, 3], np.zeros((3, 3)), [1, 2, 3])
        T0 = gaussian_prior_from_network(net, 2.0, 6.0).T0
        np.testing.assert_array_equal(T0, np.diag(np.diag(T0)))

    def test_chain_moments(self):
        # X ~ N(1, 2), Y = 0.5 X + e, e ~ N(-1, 1)
        net = GaussianPriorNetwork(Dag.from_arcs(("X", "Y"), [(0, 1)]), [1.0, -1.0],
                                   [[0, 0.5], [0, 0]], [2.0, 1.0])
        mean, cov = network_moments(net)
        np.testing.assert_allclose(mean, [1.0, -0.5], atol=1e-15)
        np.testing.assert_allclose(cov, [[2.0, 1.0], [1.0, 1.5]], atol=1e-15)

    def test_moment_round_trip(self):
        rng = np.random.default_rng(2)
        names = tuple("ABCD")
        for _ in range(10):
            order = rng.permutation(4)
            arcs = [(int(order[a]), int(order[b])) for b in range(4) for a in range(b) if rng.random() < 0.6]
            net = random_gaussian_net(Dag.from_arcs(names, arcs), rng)
            prior = gaussian_prior_from_network(net, rng.uniform(0.5, 5), 4 + 1 + rng.uniform(0.1, 5))
            mean, cov = network_moments(net)
            got_mean, got_cov = prior_moments(prior)
            np.testing.assert_allclose(got_mean, mean, rtol=0, atol=1e-10)
            np.testing.assert_allclose(got_cov, cov, rtol=0, atol=1e-10)

    def test_moments_by_sampling(self):
        rng = np.random.default_rng(3)
        dag = Dag.from_arcs(("A", "B", "C"), [(2, 0), (2, 1), (0, 1)])
        net = random_gaussian_net(dag, rng)
        draws = 200_000
        x = np.zeros((draws, 3))
        for i in (2, 0, 1):
            x[:, i] = net.intercepts[i] + x @ net.B[:, i] + rng.normal(scale=np.sqrt(net.variances[i]), size=draws)
        mean, cov = network_moments(net)
        np.testing.assert_allclose(x.mean(axis=0), mean, atol=6 * np.sqrt(np.diag(cov).max() / draws))
        np.testing.assert_allclose(np.cov(x.T), cov, atol=0.05 * np.abs(cov).max())

    def test_aw_too_small(self):
        net = GaussianPriorNetwork(Dag.empty(("X", "Y")), [0, 0], np.zeros((2, 2)), [1, 1])
        with pytest.raises(DomainError):
            gaussian_prior_from_network(net, 1.0, 3.0)

    def test_nonpositive_variance(self):
        with pytest.raises(DomainError):
            GaussianPriorNetwork(Dag.empty(("X",)), [0.0], [[0.0]], [0.0])

    def test_coefficient_without_arc(self):
        with pytest.raises(UsageError):
            GaussianPriorNetwork(Dag.empty(("X", "Y")), [0, 0], [[0, 1.0], [0, 0]], [1, 1])
