"""Directed acyclic graphs, independence equivalence and covered-arc reversals.

A :class:`Dag` is an immutable value: parent sets are stored as sorted tuples
so that two graphs with the same arcs compare and hash equal, which the
family-score cache relies on.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import StructuralError, UsageError


class Arc(NamedTuple):
    """A directed arc ``source -> target`` between node indices."""

    source: int
    target: int


def _find_order(n, parents):
    indegree = [len(p) for p in parents]
    children = [[] for _ in range(n)]
    for child, pa in enumerate(parents):
        for p in pa:
            children[p].append(child)
    ready = [i for i in range(n) if indegree[i] == 0]
    order = []
    # n is tiny at desk scale; a sorted list beats a heap for clarity
    while ready:
        ready.sort()
        node = ready.pop(0)
        order.append(node)
        for c in children[node]:
            indegree[c] -= 1
            if indegree[c] == 0:
                ready.append(c)
    return order


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph over named variables.

    Parameters
    ----------
    names : tuple of str
        Variable identifiers, unique. Node ``i`` is ``names[i]``.
    parents : tuple of tuple of int
        ``parents[i]`` holds the parent indices of node ``i`` in increasing
        order.
    """

    names: tuple
    parents: tuple

    def __post_init__(self):
        names = tuple(self.names)
        n = len(names)
        if len(set(names)) != n:
            raise UsageError(f"variable names are not unique: {list(names)}")
        if len(self.parents) != n:
            raise UsageError(f"expected {n} parent sets, got {len(self.parents)}")
        parents = []
        for i, pa in enumerate(self.parents):
            pa = tuple(sorted(set(int(p) for p in pa)))
            for p in pa:
                if not 0 <= p < n:
                    raise UsageError(f"parent index {p} of node {i} out of range")
                if p == i:
                    raise StructuralError(f"node {names[i]!r} is its own parent")
            parents.append(pa)
        parents = tuple(parents)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "parents", parents)
        if len(_find_order(n, parents)) != n:
            raise StructuralError("graph contains a directed cycle")

    # -- construction -----------------------------------------------------

    @classmethod
    def empty(cls, names) -> "Dag":
        names = tuple(names)
        return cls(names, tuple(() for _ in names))

    @classmethod
    def from_arcs(cls, names, arcs: Iterable) -> "Dag":
        """Build from ``(source, target)`` pairs given as indices or names."""
        names = tuple(names)
        index = {name: i for i, name in enumerate(names)}
        parents = [set() for _ in names]
        for a, b in arcs:
            i = a if isinstance(a, int) else index.get(a)
            j = b if isinstance(b, int) else index.get(b)
            if i is None or j is None:
                raise UsageError(f"arc ({a!r}, {b!r}) names an unknown variable")
            if i == j:
                raise StructuralError(f"self-loop on {names[i]!r}")
            parents[j].add(i)
        return cls(names, tuple(tuple(p) for p in parents))

    @classmethod
    def complete(cls, names, order: Sequence[int] | None = None) -> "Dag":
        """The complete DAG in which every node precedes those after it in ``order``."""
        names = tuple(names)
        order = list(range(len(names))) if order is None else list(order)
        parents = [()] * len(names)
        for pos, node in enumerate(order):
            parents[node] = tuple(order[:pos])
        return cls(names, tuple(parents))

    # -- views ------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def arcs(self) -> tuple:
        """All arcs, sorted by (source, target)."""
        return tuple(sorted(Arc(p, i) for i, pa in enumerate(self.parents) for p in pa))

    def has_arc(self, source: int, target: int) -> bool:
        return source in self.parents[target]

    def adjacent(self, i: int, j: int) -> bool:
        return i in self.parents[j] or j in self.parents[i]

    def is_complete(self) -> bool:
        return len(self.arcs) == self.n * (self.n - 1) // 2

    # -- edits (return new graphs) ------------------------------------------

    def _replace_parents(self, changes: dict) -> "Dag":
        parents = list(self.parents)
        for node, pa in changes.items():
            parents[node] = tuple(sorted(pa))
        return Dag(self.names, tuple(parents))

    def add_arc(self, source: int, target: int) -> "Dag":
        return self._replace_parents({target: set(self.parents[target]) | {source}})

    def remove_arc(self, source: int, target: int) -> "Dag":
        if not self.has_arc(source, target):
            raise UsageError(f"arc {source}->{target} is not in the graph")
        return self._replace_parents({target: set(self.parents[target]) - {source}})

    def reverse_arc(self, source: int, target: int) -> "Dag":
        if not self.has_arc(source, target):
            raise UsageError(f"arc {source}->{target} is not in the graph")
        return self._replace_parents({
            target: set(self.parents[target]) - {source},
            source: set(self.parents[source]) | {target},
        })

    def reaches(self, source: int, target: int) -> bool:
        """True if a directed path ``source -> ... -> target`` exists."""
        children = [[] for _ in range(self.n)]
        for child, pa in enumerate(self.parents):
            for p in pa:
                children[p].append(child)
        seen = {source}
        stack = [source]
        while stack:
            node = stack.pop()
            if node == target:
                return True
            for c in children[node]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return False

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "names": list(self.names),
            "arcs": [[self.names[a.source], self.names[a.target]] for a in self.arcs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Dag":
        try:
            names = obj["names"]
            arcs = obj.get("arcs", [])
        except (KeyError, AttributeError, TypeError):
            raise UsageError("DAG JSON must be an object with 'names' and 'arcs'") from None
        for arc in arcs:
            if len(arc) != 2 or not all(isinstance(x, str) for x in arc):
                raise UsageError(f"arc entry {arc!r} is not a [from, to] name pair")
        return cls.from_arcs(names, [tuple(a) for a in arcs])

    def __str__(self):
        parts = []
        for i in topological_order(self):
            if self.parents[i]:
                parts.append(f"[{self.names[i]}|{','.join(self.names[p] for p in self.parents[i])}]")
            else:
                parts.append(f"[{self.names[i]}]")
        return "".join(parts)


def topological_order(dag: Dag) -> list:
    """Node indices with parents first; ties go to the lowest index."""
    order = _find_order(dag.n, dag.parents)
    if len(order) != dag.n:
        raise StructuralError("graph contains a directed cycle")
    return order


def skeleton(dag: Dag) -> frozenset:
    """Undirected edges as a set of 2-element frozensets."""
    return frozenset(frozenset((p, i)) for i, pa in enumerate(dag.parents) for p in pa)


def v_structures(dag: Dag) -> frozenset:
    """Triples ``(i, j, k)`` with ``i -> j <- k``, ``i``, ``k`` non-adjacent and ``i < k``."""
    found = set()
    for j, pa in enumerate(dag.parents):
        for a_pos, i in enumerate(pa):
            for k in pa[a_pos + 1:]:
                if not dag.adjacent(i, k):
                    found.add((i, j, k))
    return frozenset(found)


def _check_same_variables(d1: Dag, d2: Dag):
    if d1.names != d2.names:
        raise UsageError(
            f"graphs are over different variables: {list(d1.names)} vs {list(d2.names)}"
        )


def independence_equivalent(d1: Dag, d2: Dag) -> bool:
    """Same skeleton and same v-structures."""
    _check_same_variables(d1, d2)
    return skeleton(d1) == skeleton(d2) and v_structures(d1) == v_structures(d2)


def equivalence_key(dag: Dag) -> tuple:
    """Hashable key shared exactly by independence-equivalent graphs."""
    edges = tuple(sorted(tuple(sorted(e)) for e in skeleton(dag)))
    return edges, tuple(sorted(v_structures(dag)))


def is_covered(dag: Dag, arc) -> bool:
    """True if removing ``arc`` would leave both endpoints with the same parents."""
    source, target = arc
    if not dag.has_arc(source, target):
        raise UsageError(f"arc {source}->{target} is not in the graph")
    return set(dag.parents[target]) - {source} == set(dag.parents[source])


def covered_arcs(dag: Dag) -> list:
    return [a for a in dag.arcs if is_covered(dag, a)]


def covered_reversal_sequence(d1: Dag, d2: Dag):
    """Shortest list of covered arcs whose successive reversal maps ``d1`` to ``d2``.

    Breadth-first search over the graphs reachable by covered reversals. Returns
    ``None`` when ``d2`` is unreachable, which happens exactly when the two
    graphs are not independence equivalent. Intended for n <= 8.
    """
    _check_same_variables(d1, d2)
    if d1 == d2:
        return []
    if skeleton(d1) != skeleton(d2):
        return None
    previous = {d1: None}
    queue = deque([d1])
    while queue:
        g = queue.popleft()
        for arc in covered_arcs(g):
            h = g.reverse_arc(*arc)
            if h in previous:
                continue
            previous[h] = (g, arc)
            if h == d2:
                path = []
                node = h
                while previous[node] is not None:
                    node, step = previous[node]
                    path.append(step)
                return path[::-1]
            queue.append(h)
    return None


def apply_reversals(dag: Dag, reversals) -> Dag:
    """Reverse each arc in turn, insisting that it is covered when reversed."""
    for arc in reversals:
        if not is_covered(dag, arc):
            raise UsageError(f"arc {tuple(arc)} is not covered at its turn")
        dag = dag.reverse_arc(*arc)
    return dag
