"""Structure posterior, exhaustive enumeration and greedy hill climbing.

Every structure score used here is a sum of per-family terms, so search
caches family scores keyed by ``(node, sorted parents)`` and rescoring a
neighbour only touches the one or two families a move changes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from . import discrete, gaussian
from .dag import Dag, equivalence_key
from .errors import CapacityError, DomainError, StructuralError, UsageError

MAX_ENUMERATION_NODES = 5
MOVE_TYPES = ("add", "delete", "reverse")


@dataclass(frozen=True)
class StructurePrior:
    """Log prior over DAGs: uniform, or ``kappa`` per arc (``kappa <= 0``).

    ``offset`` is added to every structure and never changes a comparison.
    """

    kind: str = "uniform"
    kappa: float = 0.0
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform", "arc-penalty"):
            raise UsageError(f"unknown structure prior {self.kind!r}")
        if not np.isfinite(self.kappa) or not np.isfinite(self.offset):
            raise DomainError("structure prior values must be finite")
        if self.kind == "arc-penalty" and self.kappa > 0:
            raise DomainError(f"arc penalty must be <= 0, got {self.kappa}")

    @property
    def per_arc(self) -> float:
        return self.kappa if self.kind == "arc-penalty" else 0.0

    def log_prior(self, dag: Dag) -> float:
        return self.offset + self.per_arc * len(dag.arcs)


@dataclass(frozen=True)
class SearchConfig:
    max_parents: int = 5
    restarts: int = 1
    seed: int = 0
    tolerance: float = 1e-12
    restart_arc_probability: float = 0.3

    def __post_init__(self):
        if self.max_parents < 0:
            raise UsageError("max_parents must be >= 0")
        if self.restarts < 1:
            raise UsageError("restarts must be >= 1")


def family_scorer(data, prior) -> Callable[[int, tuple], float]:
    """Per-family score function for the data type at hand."""
    if isinstance(data, discrete.DiscreteDataset):
        if not isinstance(prior, discrete.DirichletJointPrior):
            raise UsageError("discrete data needs a Dirichlet joint prior")
        discrete._check_aligned(data, prior)
        return lambda node, parents: discrete.family_score(prior, data, node, parents)
    if isinstance(data, gaussian.GaussianDataset):
        if not isinstance(prior, gaussian.NormalWishartPrior):
            raise UsageError("continuous data needs a normal-Wishart prior")
        return gaussian.family_scorer(prior, data)
    raise UsageError(f"unsupported data type {type(data).__name__}")


def log_marginal_likelihood(dag: Dag, data, prior) -> float:
    if isinstance(data, discrete.DiscreteDataset):
        return discrete.log_score_bde(dag, data, prior)
    if isinstance(data, gaussian.GaussianDataset):
        return gaussian.log_score_bge(dag, data, prior)
    raise UsageError(f"unsupported data type {type(data).__name__}")


def log_posterior(dag: Dag, data, prior, sprior: StructurePrior | None = None) -> float:
    """Unnormalized log posterior: log structure prior plus log marginal likelihood."""
    sprior = sprior or StructurePrior()
    return sprior.log_prior(dag) + log_marginal_likelihood(dag, data, prior)


class ScoreCache:
    """Memoized family scores. Inserting the same key twice stores the same value."""

    def __init__(self, scorer, enabled: bool = True):
        self.scorer = scorer
        self.enabled = enabled
        self.values: dict = {}
        self.hits = 0
        self.misses = 0

    def __call__(self, node: int, parents) -> float:
        key = (node, tuple(sorted(parents)))
        if self.enabled:
            value = self.values.get(key)
            if value is not None:
                self.hits += 1
                return value
        self.misses += 1
        value = float(self.scorer(*key))
        if self.enabled:
            self.values.setdefault(key, value)
        return value

    def total(self, dag: Dag) -> float:
        return sum(self(i, pa) for i, pa in enumerate(dag.parents))


# ---------------------------------------------------------------------------
# enumeration


def enumerate_dags(n: int, names=None) -> list:
    """Every labeled DAG on ``n`` nodes, in a fixed order (empty graph first)."""
    if n > MAX_ENUMERATION_NODES:
        raise CapacityError(f"enumeration is limited to n <= {MAX_ENUMERATION_NODES}")
    if n < 0:
        raise UsageError("n must be non-negative")
    names = tuple(names) if names is not None else tuple(f"X{i}" for i in range(n))
    pairs = list(itertools.combinations(range(n), 2))
    out = []
    for states in itertools.product((0, 1, 2), repeat=len(pairs)):
        parents = [[] for _ in range(n)]
        for (i, j), s in zip(pairs, states):
            if s == 1:
                parents[j].append(i)
            elif s == 2:
                parents[i].append(j)
        try:
            out.append(Dag(names, tuple(tuple(p) for p in parents)))
        except StructuralError:
            continue
    return out


def group_by_equivalence(dags) -> list:
    """Partition into independence-equivalence classes, in order of first appearance."""
    classes: dict = {}
    for d in dags:
        classes.setdefault(equivalence_key(d), []).append(d)
    return list(classes.values())


def exhaustive_posterior(data, prior, sprior: StructurePrior | None = None, names=None):
    """``(dags, log_posteriors, probabilities)`` over every DAG on the data's variables."""
    sprior = sprior or StructurePrior()
    names = names or getattr(data, "names", None)
    dags = enumerate_dags(data.n, names)
    cache = ScoreCache(family_scorer(data, prior))
    logp = np.array([sprior.log_prior(d) + cache.total(d) for d in dags])
    return dags, logp, np.exp(logp - logsumexp(logp))


# ---------------------------------------------------------------------------
# hill climbing


@dataclass
class SearchResult:
    dag: Dag
    score: float
    trace: list = field(default_factory=list)
    restart_scores: list = field(default_factory=list)
    cache_hits: int = 0
    cache_misses: int = 0


def _moves(dag: Dag, max_parents: int):
    """Legal single-arc moves as ``(type, source, target)``."""
    n = dag.n
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            if dag.has_arc(u, v):
                yield ("delete", u, v)
                if len(dag.parents[u]) < max_parents and not _reaches_without(dag, u, v):
                    yield ("reverse", u, v)
            elif not dag.has_arc(v, u):
                if len(dag.parents[v]) < max_parents and not dag.reaches(v, u):
                    yield ("add", u, v)


def _reaches_without(dag: Dag, u: int, v: int) -> bool:
    """True if ``v`` is reachable from ``u`` other than through the arc ``u -> v``."""
    return dag.remove_arc(u, v).reaches(u, v)


def _move_delta(dag: Dag, move, cache: ScoreCache, per_arc: float) -> float:
    kind, u, v = move
    pv = set(dag.parents[v])
    if kind == "add":
        return cache(v, pv | {u}) - cache(v, pv) + per_arc
    if kind == "delete":
        return cache(v, pv - {u}) - cache(v, pv) - per_arc
    pu = set(dag.parents[u])
    return (cache(v, pv - {u}) - cache(v, pv)) + (cache(u, pu | {v}) - cache(u, pu))


def _apply(dag: Dag, move) -> Dag:
    kind, u, v = move
    if kind == "add":
        return dag.add_arc(u, v)
    if kind == "delete":
        return dag.remove_arc(u, v)
    return dag.reverse_arc(u, v)


def _climb(start: Dag, cache: ScoreCache, sprior: StructurePrior, config: SearchConfig, restart: int):
    dag = start
    score = sprior.log_prior(dag) + cache.total(dag)
    trace = [{"restart": restart, "step": 0, "move": None, "score": score}]
    step = 0
    while True:
        scored = [(_move_delta(dag, mv, cache, sprior.per_arc), mv) for mv in _moves(dag, config.max_parents)]
        if not scored:
            break
        best = max(d for d, _ in scored)
        if not best > config.tolerance:
            break
        # near-equal deltas (score-equivalent moves) count as ties
        window = config.tolerance * max(1.0, abs(score))
        move = min(mv for d, mv in scored if d >= best - window)
        delta = next(d for d, mv in scored if mv == move)
        dag = _apply(dag, move)
        score += delta
        step += 1
        trace.append({
            "restart": restart,
            "step": step,
            "move": [move[0], dag.names[move[1]], dag.names[move[2]]],
            "score": score,
        })
    return dag, score, trace


def random_dag(names, rng, arc_probability: float, max_parents: int) -> Dag:
    n = len(names)
    order = rng.permutation(n)
    parents = [[] for _ in range(n)]
    for b in range(n):
        for a in range(b):
            child = order[b]
            if len(parents[child]) < max_parents and rng.random() < arc_probability:
                parents[child].append(int(order[a]))
    return Dag(tuple(names), tuple(tuple(p) for p in parents))


def hill_climb(data, prior, sprior: StructurePrior | None = None, config: SearchConfig | None = None,
               use_cache: bool = True, names=None) -> SearchResult:
    """Greedy search over add/delete/reverse moves.

    The first climb starts from the empty graph; each further restart starts
    from a random DAG drawn with ``config.seed``. The best final graph over
    all climbs is returned, the earliest one on ties.
    """
    sprior = sprior or StructurePrior()
    config = config or SearchConfig()
    names = tuple(names or getattr(data, "names", None) or (f"X{i}" for i in range(data.n)))
    cache = ScoreCache(family_scorer(data, prior), enabled=use_cache)
    rng = np.random.default_rng(config.seed)
    best = None
    trace = []
    restart_scores = []
    for restart in range(config.restarts):
        if restart == 0:
            start = Dag.empty(names)
        else:
            start = random_dag(names, rng, config.restart_arc_probability, config.max_parents)
        dag, score, t = _climb(start, cache, sprior, config, restart)
        trace.extend(t)
        restart_scores.append(score)
        if best is None or score > best[1] + config.tolerance:
            best = (dag, score)
    # report the exact total rather than the accumulated deltas
    final = sprior.log_prior(best[0]) + cache.total(best[0])
    return SearchResult(best[0], final, trace, restart_scores, cache.hits, cache.misses)
