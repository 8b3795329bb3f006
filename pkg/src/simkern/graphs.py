"""Hop-count metrics on connected undirected graphs."""
from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .linalg import DEFAULT_TOL, SymMatrix, eigvalsh, is_cnd, negative_type_necessary

__all__ = [
    "Graph",
    "GraphReport",
    "bfs_distances",
    "k23_graph",
    "graph_negative_type_report",
    "read_edge_csv",
]


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with ordered node labels.

    Matrices built from the graph index nodes in ``labels`` order.
    Construction fails for disconnected graphs, self-loops and duplicate
    edges.
    """

    labels: tuple[str, ...]
    edges: frozenset

    def __init__(self, labels: Sequence[str], edges: Iterable[tuple[str, str]]):
        labels = tuple(str(x) for x in labels)
        if not labels:
            raise ValueError("graph needs at least one node")
        if len(set(labels)) != len(labels):
            raise ValueError("node labels must be distinct")
        known = set(labels)
        seen = set()
        for u, v in edges:
            u, v = str(u), str(v)
            if u == v:
                raise ValueError(f"self-loop at {u!r}")
            if u not in known or v not in known:
                raise ValueError(f"edge ({u!r}, {v!r}) uses an unknown node")
            e = frozenset((u, v))
            if e in seen:
                raise ValueError(f"duplicate edge ({u!r}, {v!r})")
            seen.add(e)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "edges", frozenset(seen))
        unreached = set(labels) - set(self._bfs(0))
        if unreached:
            raise ValueError(f"graph is disconnected; unreachable from {labels[0]!r}: "
                             f"{sorted(unreached)}")

    @classmethod
    def from_edges(cls, pairs: Iterable[tuple[str, str]]) -> "Graph":
        """Nodes are ordered by first appearance in the edge list."""
        pairs = [(str(u), str(v)) for u, v in pairs]
        order: dict[str, None] = {}
        for u, v in pairs:
            order.setdefault(u)
            order.setdefault(v)
        return cls(list(order), pairs)

    def adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {x: [] for x in self.labels}
        rank = {x: i for i, x in enumerate(self.labels)}
        for e in self.edges:
            u, v = sorted(e, key=rank.__getitem__)
            adj[u].append(v)
            adj[v].append(u)
        for x in adj:
            adj[x].sort(key=rank.__getitem__)
        return adj

    def _bfs(self, src: int) -> dict[str, int]:
        adj = self.adjacency()
        start = self.labels[src]
        dist = {start: 0}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist


def bfs_distances(g: Graph) -> SymMatrix:
    """Shortest-path hop counts between all node pairs, in label order."""
    n = len(g.labels)
    out = np.zeros((n, n))
    for i in range(n):
        dist = g._bfs(i)
        out[i] = [dist[x] for x in g.labels]
    return SymMatrix(out)


def k23_graph() -> Graph:
    """Complete bipartite graph with parts {A, E} and {B, C, D}.

    Its hop distances, in node order A..E, reproduce Delta.
    """
    return Graph("ABCDE", [(u, v) for u in "AE" for v in "BCD"])


@dataclass(frozen=True)
class GraphReport:
    labels: tuple[str, ...]
    distances: SymMatrix
    eigenvalues: tuple[float, ...]
    positive_count: int
    necessary_passed: bool
    cnd_passed: bool
    witness: tuple[float, ...] | None
    witness_form: float

    @property
    def passed(self) -> bool:
        return self.necessary_passed and self.cnd_passed

    def to_dict(self) -> dict:
        return {
            "order": list(self.labels),
            "distances": self.distances.tolist(),
            "eigenvalues": list(self.eigenvalues),
            "positive_count": self.positive_count,
            "necessary_condition": "pass" if self.necessary_passed else "fail",
            "cnd": "pass" if self.cnd_passed else "fail",
            "witness": None if self.witness is None else list(self.witness),
            "witness_form": self.witness_form,
        }


def graph_negative_type_report(g: Graph, tol: float = DEFAULT_TOL) -> GraphReport:
    """Spectral negative-type diagnostics for the hop metric of ``g``."""
    m = bfs_distances(g)
    spec = eigvalsh(m)
    nec = negative_type_necessary(m, tol)
    cnd = is_cnd(m, tol)
    return GraphReport(
        labels=g.labels,
        distances=m,
        eigenvalues=tuple(float(x) for x in spec.eigenvalues),
        positive_count=nec.positive_count,
        necessary_passed=nec.passed,
        cnd_passed=cnd.passed,
        witness=None if cnd.witness is None else tuple(float(x) for x in cnd.witness),
        witness_form=cnd.max_form,
    )


def read_edge_csv(source) -> Graph:
    """Edge list with two label columns per row; labels are stripped, case-sensitive."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="") as fh:
            return read_edge_csv(fh)
    pairs = []
    for lineno, row in enumerate(csv.reader(source), 1):
        row = [c.strip() for c in row]
        if not any(row):
            continue
        if len(row) != 2 or not all(row):
            raise ValueError(f"line {lineno}: expected two labels, got {row!r}")
        pairs.append((row[0], row[1]))
    if not pairs:
        raise ValueError("edge list is empty")
    return Graph.from_edges(pairs)
