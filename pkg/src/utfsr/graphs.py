"""Directed and undirected graphs over nodes ``0 .. n-1``."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class DirectedGraph:
    """Edge ``(i, j)`` means node ``i`` is a parent of node ``j``."""

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {(i, j)} outside node range {self.n}")
        object.__setattr__(self, "edges", edges)

    def parents(self, j: int) -> set[int]:
        return {a for a, b in self.edges if b == j}

    def children(self, i: int) -> set[int]:
        return {b for a, b in self.edges if a == i}

    def two_cycles(self) -> list[tuple[int, int]]:
        return sorted((i, j) for i, j in self.edges if i < j and (j, i) in self.edges)


@dataclass(frozen=True)
class UndirectedGraph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        edges = set()
        for e in self.edges:
            a, b = tuple(e)
            if a == b:
                raise ValueError(f"self-loop at node {a}")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge {(a, b)} outside node range {self.n}")
            edges.add(_pair(int(a), int(b)))
        object.__setattr__(self, "edges", frozenset(edges))

    def has_edge(self, a: int, b: int) -> bool:
        return _pair(a, b) in self.edges

    def neighbors(self, i: int) -> set[int]:
        return {b if a == i else a for a, b in self.edges if i in (a, b)}

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def without(self, removed) -> "UndirectedGraph":
        drop = {_pair(*e) for e in removed}
        return UndirectedGraph(self.n, self.edges - drop)

    def issubgraph(self, other: "UndirectedGraph") -> bool:
        return self.n == other.n and self.edges <= other.edges

    def triangles(self) -> list[tuple[int, int, int]]:
        return enumerate_triangles(self)

    def to_dot(self, name: str = "G", labels=None) -> str:
        labels = labels or [f"y{i + 1}" for i in range(self.n)]
        lines = [f"graph {name} {{"]
        lines += [f'  "{lab}";' for lab in labels]
        lines += [f'  "{labels[a]}" -- "{labels[b]}";' for a, b in self.sorted_edges()]
        lines.append("}")
        return "\n".join(lines) + "\n"


def skeleton(g: DirectedGraph) -> UndirectedGraph:
    return UndirectedGraph(g.n, frozenset(_pair(i, j) for i, j in g.edges))


def moral_graph(g: DirectedGraph) -> UndirectedGraph:
    """Skeleton plus an edge between every pair of nodes sharing a child."""
    edges = set(skeleton(g).edges)
    for child in range(g.n):
        for a, b in combinations(sorted(g.parents(child)), 2):
            edges.add((a, b))
    return UndirectedGraph(g.n, frozenset(edges))


def markov_blanket(g: DirectedGraph, j: int) -> set[int]:
    return moral_graph(g).neighbors(j)


def enumerate_triangles(g: UndirectedGraph) -> list[tuple[int, int, int]]:
    """All 3-cliques as sorted triples, in lexicographic order."""
    adj = {i: g.neighbors(i) for i in range(g.n)}
    out = []
    for a, b in g.sorted_edges():
        for c in sorted(adj[a] & adj[b]):
            if c > b:
                out.append((a, b, c))
    return sorted(out)
