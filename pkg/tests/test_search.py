import itertools

import numpy as np
import pytest

from bnscore.dag import Dag, independence_equivalent
from bnscore.discrete import DirichletJointPrior, log_score_bde
from bnscore.errors import CapacityError, DomainError, UsageError
from bnscore.gaussian import NormalWishartPrior
from bnscore.search import (
    ScoreCache,
    SearchConfig,
    StructurePrior,
    enumerate_dags,
    exhaustive_posterior,
    family_scorer,
    group_by_equivalence,
    hill_climb,
    log_posterior,
)
from generators import random_cpts, random_discrete_data, random_gaussian_data, sample_discrete


def names(n):
    return tuple(f"X{i}" for i in range(n))


class TestEnumeration:
    @pytest.mark.parametrize("n,count", [(0, 1), (1, 1), (2, 3), (3, 25), (4, 543)])
    def test_counts(self, n, count):
        dags = enumerate_dags(n)
        assert len(dags) == count
        assert len(set(dags)) == count

    def test_brute_force_filter_n3(self):
        # every digraph on 3 nodes without 2-cycles, kept if acyclic
        from bnscore.errors import StructuralError

        kept = 0
        for mask in range(2 ** 6):
            arcs = [pair for k, pair in enumerate(itertools.permutations(range(3), 2)) if mask >> k & 1]
            try:
                Dag.from_arcs(names(3), arcs)
                kept += 1
            except StructuralError:
                pass
        assert kept == 25

    def test_capacity(self):
        with pytest.raises(CapacityError):
            enumerate_dags(6)

    def test_empty_first(self):
        assert enumerate_dags(3)[0] == Dag.empty(names(3))

    @pytest.mark.parametrize("n,count", [(1, 1), (2, 2), (3, 11), (4, 185)])
    def test_class_counts(self, n, count):
        assert len(group_by_equivalence(enumerate_dags(n))) == count

    def test_class_sizes_n2(self):
        assert sorted(len(c) for c in group_by_equivalence(enumerate_dags(2))) == [1, 2]

    def test_classes_match_pairwise_test(self):
        dags = enumerate_dags(3)
        classes = group_by_equivalence(dags)
        label = {d: k for k, cls in enumerate(classes) for d in cls}
        for a, b in itertools.product(dags, repeat=2):
            assert (label[a] == label[b]) == independence_equivalent(a, b)


class TestPosterior:
    def test_uniform_prior_differences(self):
        rng = np.random.default_rng(0)
        prior = DirichletJointPrior.uniform(3.0, (2, 2, 2), names(3))
        data = random_discrete_data((2, 2, 2), 40, rng, names(3))
        d1, d2 = enumerate_dags(3, names(3))[3], enumerate_dags(3, names(3))[17]
        diff = log_posterior(d1, data, prior) - log_posterior(d2, data, prior)
        assert diff == log_score_bde(d1, data, prior) - log_score_bde(d2, data, prior)

    def test_normalized_n2(self):
        rng = np.random.default_rng(1)
        prior = DirichletJointPrior.uniform(4.0, (2, 3), names(2))
        data = random_discrete_data((2, 3), 30, rng, names(2))
        dags, logp, probs = exhaustive_posterior(data, prior)
        assert len(dags) == 3
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_argmax_matches_direct_scoring(self):
        rng = np.random.default_rng(2)
        prior = DirichletJointPrior.uniform(5.0, (2, 2, 3), names(3))
        data = random_discrete_data((2, 2, 3), 60, rng, names(3))
        sprior = StructurePrior("arc-penalty", -0.7)
        dags, logp, _ = exhaustive_posterior(data, prior, sprior)
        direct = [log_score_bde(d, data, prior) - 0.7 * len(d.arcs) for d in dags]
        np.testing.assert_allclose(logp, direct, rtol=1e-12)
        assert int(np.argmax(logp)) == int(np.argmax(direct))

    def test_offset_does_not_change_probabilities(self):
        rng = np.random.default_rng(3)
        prior = DirichletJointPrior.uniform(2.0, (2, 2, 2), names(3))
        data = random_discrete_data((2, 2, 2), 25, rng, names(3))
        _, _, p0 = exhaustive_posterior(data, prior, StructurePrior("arc-penalty", -1.0))
        _, _, p1 = exhaustive_posterior(data, prior, StructurePrior("arc-penalty", -1.0, offset=123.4))
        np.testing.assert_allclose(p0, p1, rtol=1e-10)

    def test_positive_penalty_rejected(self):
        with pytest.raises(DomainError):
            StructurePrior("arc-penalty", 0.5)

    def test_unknown_kind(self):
        with pytest.raises(UsageError):
            StructurePrior("other")

    def test_prior_data_mismatch(self):
        rng = np.random.default_rng(4)
        data = random_discrete_data((2, 2), 5, rng)
        with pytest.raises(UsageError):
            family_scorer(data, NormalWishartPrior([0, 0], 1.0, np.eye(2), 3.0))


class TestCache:
    def test_hits_and_values(self):
        calls = []
        cache = ScoreCache(lambda i, pa: calls.append((i, pa)) or float(i + len(pa)))
        assert cache(2, [1, 0]) == 4.0
        assert cache(2, (0, 1)) == 4.0
        assert calls == [(2, (0, 1))]
        assert (cache.hits, cache.misses) == (1, 1)

    def test_disabled(self):
        cache = ScoreCache(lambda i, pa: 1.0, enabled=False)
        cache(0, ())
        cache(0, ())
        assert (cache.hits, cache.misses) == (0, 2)

    def test_on_off_agree(self):
        rng = np.random.default_rng(5)
        prior = DirichletJointPrior.uniform(2.0, (2, 3, 2, 2), names(4))
        data = random_discrete_data((2, 3, 2, 2), 80, rng, names(4))
        config = SearchConfig(restarts=3, seed=11)
        a = hill_climb(data, prior, config=config, use_cache=True)
        b = hill_climb(data, prior, config=config, use_cache=False)
        assert a.dag == b.dag
        assert a.score == b.score
        assert a.trace == b.trace
        assert a.cache_hits > 0 and b.cache_hits == 0


class TestHillClimb:
    def test_empty_data_keeps_empty_graph(self):
        prior = DirichletJointPrior.uniform(2.0, (2, 2, 2), names(3))
        data = random_discrete_data((2, 2, 2), 0, np.random.default_rng(6), names(3))
        result = hill_climb(data, prior)
        assert result.dag == Dag.empty(names(3))
        assert len(result.trace) == 1

    def test_trace_strictly_increases(self):
        rng = np.random.default_rng(7)
        prior = DirichletJointPrior.uniform(4.0, (2, 2, 2, 2), names(4))
        data = random_discrete_data((2, 2, 2, 2), 150, rng, names(4))
        result = hill_climb(data, prior, config=SearchConfig(restarts=4, seed=3))
        for restart in range(4):
            scores = [t["score"] for t in result.trace if t["restart"] == restart]
            assert all(b > a for a, b in zip(scores, scores[1:]))

    def test_incremental_score_matches_full(self):
        rng = np.random.default_rng(8)
        prior = DirichletJointPrior.uniform(4.0, (2, 2, 3), names(3))
        data = random_discrete_data((2, 2, 3), 200, rng, names(3))
        sprior = StructurePrior("arc-penalty", -0.3)
        result = hill_climb(data, prior, sprior, SearchConfig(restarts=3, seed=1))
        assert result.score == pytest.approx(log_posterior(result.dag, data, prior, sprior), abs=1e-9)
        best_trace = max(result.restart_scores)
        assert best_trace == pytest.approx(result.score, abs=1e-9)

    def test_deterministic(self):
        rng = np.random.default_rng(9)
        prior = DirichletJointPrior.uniform(2.0, (2, 2, 2), names(3))
        data = random_discrete_data((2, 2, 2), 50, rng, names(3))
        config = SearchConfig(restarts=5, seed=4)
        a, b = hill_climb(data, prior, config=config), hill_climb(data, prior, config=config)
        assert a.dag == b.dag and a.trace == b.trace

    def test_max_parents(self):
        rng = np.random.default_rng(10)
        dag = Dag.from_arcs(names(4), [(0, 3), (1, 3), (2, 3)])
        cards = (2, 2, 2, 2)
        data = sample_discrete(dag, cards, random_cpts(dag, cards, rng, 0.3), 2000, rng)
        prior = DirichletJointPrior.uniform(1.0, cards, names(4))
        result = hill_climb(data, prior, config=SearchConfig(max_parents=1, restarts=3, seed=0))
        assert max(len(p) for p in result.dag.parents) <= 1

    def test_reaches_exhaustive_maximum_gaussian(self):
        rng = np.random.default_rng(11)
        prior = NormalWishartPrior(np.zeros(3), 1.0, np.eye(3), 5.0, names(3))
        data = random_gaussian_data(3, 50, rng, names(3))
        _, logp, _ = exhaustive_posterior(data, prior)
        result = hill_climb(data, prior, config=SearchConfig(restarts=5, seed=2))
        assert result.score == pytest.approx(logp.max(), abs=1e-8)

    def test_recovers_chain_class(self):
        rng = np.random.default_rng(12)
        chain = Dag.from_arcs(names(3), [(0, 1), (1, 2)])
        cpts = [[[0.5, 0.5]], [[0.9, 0.1], [0.1, 0.9]], [[0.9, 0.1], [0.1, 0.9]]]
        data = sample_discrete(chain, (2, 2, 2), cpts, 10_000, rng)
        prior = DirichletJointPrior.uniform(1.0, (2, 2, 2), names(3))
        result = hill_climb(data, prior, config=SearchConfig(restarts=3, seed=0))
        assert independence_equivalent(result.dag, chain)
