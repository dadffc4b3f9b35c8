"""Multigraph analytics: shortest paths, k-hop neighborhoods, edge and
group betweenness centrality.

Paths are unweighted (hop count). Parallel edges are kept distinct, and
two shortest paths that differ only in which parallel edge they take
count as two paths. All computations iterate nodes in sorted order and
edges in their stored order, so results are deterministic and invariant
under input permutations when the edge list is canonically sorted.
"""

from __future__ import annotations

import math
from collections import deque
from typing import Hashable, Iterable

from .model import GcaError, Network

EdgeKey = Hashable


class GraphError(GcaError):
    """Unknown node or edge, or an invalid edge group."""


class Multigraph:
    """Immutable undirected multigraph.

    Nodes are integers; edges are ``(key, u, v)`` with an arbitrary
    hashable key. Parallel edges are distinct entries.
    """

    __slots__ = ("nodes", "edges", "adj", "_key_set")

    def __init__(self, nodes: Iterable[int], edges: Iterable[tuple[EdgeKey, int, int]]):
        self.nodes: tuple[int, ...] = tuple(sorted(set(nodes)))
        node_set = set(self.nodes)
        self.edges: tuple[tuple[EdgeKey, int, int], ...] = tuple(edges)
        adj: dict[int, list[tuple[int, int]]] = {n: [] for n in self.nodes}
        keys = set()
        for idx, (key, u, v) in enumerate(self.edges):
            if u not in node_set or v not in node_set:
                raise GraphError(f"edge {key!r} endpoint not in node set")
            if key in keys:
                raise GraphError(f"duplicate edge key {key!r}")
            keys.add(key)
            adj[u].append((idx, v))
            adj[v].append((idx, u))
        self.adj: dict[int, tuple[tuple[int, int], ...]] = {
            n: tuple(lst) for n, lst in adj.items()
        }
        self._key_set = frozenset(keys)

    @classmethod
    def from_network(cls, net: Network) -> "Multigraph":
        """Graph over internal bus indices with in-service branches as edges."""
        nodes = range(len(net.buses))
        edges = []
        for pos in net.active_positions:
            br = net.branches[pos]
            edges.append((br.key, net.bus_index[br.from_bus], net.bus_index[br.to_bus]))
        return cls(nodes, edges)

    def __contains__(self, node: int) -> bool:
        return node in self.adj

    @property
    def edge_keys(self) -> frozenset:
        return self._key_set

    def has_edge(self, key: EdgeKey) -> bool:
        return key in self._key_set

    def induced_subgraph(self, nodes: Iterable[int]) -> "Multigraph":
        keep = set(nodes)
        unknown = keep - set(self.nodes)
        if unknown:
            raise GraphError(f"unknown nodes {sorted(unknown)}")
        edges = [(k, u, v) for (k, u, v) in self.edges if u in keep and v in keep]
        return Multigraph(keep, edges)


def _check_nodes(g: Multigraph, nodes: Iterable[int]) -> None:
    for n in nodes:
        if n not in g.adj:
            raise GraphError(f"unknown node {n}")


def _sssp_dag(g: Multigraph, source: int):
    """Single-source BFS with per-edge shortest-path counting.

    Returns the discovery order, hop distances, exact path counts
    (Python ints), and per-node predecessor list of ``(node, edge_index)``
    entries, one per shortest-path DAG edge including parallels.
    """
    dist: dict[int, int] = {source: 0}
    sigma: dict[int, int] = {source: 1}
    preds: dict[int, list[tuple[int, int]]] = {source: []}
    order: list[int] = [source]
    queue = deque([source])
    while queue:
        v = queue.popleft()
        dv = dist[v]
        for eidx, w in g.adj[v]:
            if w not in dist:
                dist[w] = dv + 1
                sigma[w] = 0
                preds[w] = []
                order.append(w)
                queue.append(w)
            if dist[w] == dv + 1:
                sigma[w] += sigma[v]
                preds[w].append((v, eidx))
    return order, dist, sigma, preds


def shortest_path_counts(
    g: Multigraph, s: int, t: int
) -> tuple[float, int, tuple[EdgeKey, ...]]:
    """Hop distance, exact number of shortest paths, and one such path.

    Returns ``(inf, 0, ())`` when ``t`` is unreachable from ``s``.
    Parallel edges between the same pair count as distinct paths.
    """
    _check_nodes(g, (s, t))
    if s == t:
        return 0, 1, ()
    order, dist, sigma, preds = _sssp_dag(g, s)
    if t not in dist:
        return math.inf, 0, ()
    path: list[EdgeKey] = []
    node = t
    while node != s:
        prev, eidx = preds[node][0]
        path.append(g.edges[eidx][0])
        node = prev
    return dist[t], sigma[t], tuple(reversed(path))


def edge_betweenness_all(g: Multigraph) -> dict[EdgeKey, float]:
    """Betweenness of every edge via Brandes dependency accumulation.

    BC(e) sums, over unordered node pairs {s, t}, the fraction of
    shortest s-t paths that contain e; disconnected pairs contribute 0.
    """
    bc = {key: 0.0 for (key, _, _) in g.edges}
    for source in g.nodes:
        order, _, sigma, preds = _sssp_dag(g, source)
        delta = {v: 0.0 for v in order}
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v, eidx in preds[w]:
                c = sigma[v] * coeff
                bc[g.edges[eidx][0]] += c
                delta[v] += c
    # each unordered pair was visited from both endpoints
    return {key: val / 2.0 for key, val in bc.items()}


def group_betweenness(g: Multigraph, group: Iterable[EdgeKey]) -> float:
    """Group betweenness centrality of an edge set.

    For every unordered node pair, adds the fraction of shortest paths
    that contain at least one group edge (set semantics: a path counts
    once however many group edges it uses). A singleton group reduces
    exactly to ``edge_betweenness`` of that edge.

    Paths avoiding the group are counted on the shortest-path DAG with
    group edges removed, so the per-pair ratio uses exact integer counts.
    """
    members = tuple(group)
    if not members:
        raise GraphError("edge group is empty")
    group_set = frozenset(members)
    if len(group_set) != len(members):
        raise GraphError("edge group contains duplicates")
    unknown = group_set - g.edge_keys
    if unknown:
        raise GraphError(f"edge group contains unknown edges {sorted(map(repr, unknown))}")

    total = 0.0
    for source in g.nodes:
        order, _, sigma, preds = _sssp_dag(g, source)
        avoid: dict[int, int] = {source: 1}
        for w in order[1:]:
            count = 0
            for v, eidx in preds[w]:
                if g.edges[eidx][0] not in group_set:
                    count += avoid[v]
            avoid[w] = count
        for t in order:
            if t != source:
                total += (sigma[t] - avoid[t]) / sigma[t]
    return total / 2.0


def edge_betweenness(g: Multigraph, e: EdgeKey) -> float:
    """Betweenness centrality of one edge.

    Computed as the singleton group betweenness, which makes
    ``group_betweenness(g, {e}) == edge_betweenness(g, e)`` exact.
    """
    if not g.has_edge(e):
        raise GraphError(f"unknown edge {e!r}")
    return group_betweenness(g, (e,))


def representative_path_count(g: Multigraph, group: Iterable[EdgeKey]) -> float:
    """Legacy group score: halved ordered-pair count of one representative
    shortest path per pair, summed per group member.

    Kept for A/B comparison against ``group_betweenness``; this variant
    ignores path multiplicity and counts a path once per member it hits.
    """
    members = tuple(group)
    if not members:
        raise GraphError("edge group is empty")
    unknown = frozenset(members) - g.edge_keys
    if unknown:
        raise GraphError(f"edge group contains unknown edges {sorted(map(repr, unknown))}")
    hits = {key: 0 for key in members}
    for source in g.nodes:
        order, _, _, preds = _sssp_dag(g, source)
        for t in order:
            if t == source:
                continue
            node = t
            on_path = set()
            while node != source:
                prev, eidx = preds[node][0]
                on_path.add(g.edges[eidx][0])
                node = prev
            for key in members:
                if key in on_path:
                    hits[key] += 1
    return sum(hits.values()) / 2.0


def khop_ball(g: Multigraph, seeds: Iterable[int], level: int) -> frozenset[int]:
    """Nodes within ``level`` hops of any seed (breadth-first)."""
    seed_list = sorted(set(seeds))
    if not seed_list:
        raise GraphError("seed set is empty")
    _check_nodes(g, seed_list)
    if level < 0:
        raise GraphError(f"level must be >= 0, got {level}")
    dist = {s: 0 for s in seed_list}
    queue = deque(seed_list)
    while queue:
        v = queue.popleft()
        if dist[v] == level:
            continue
        for _, w in g.adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return frozenset(dist)


def khop_subgraph(g: Multigraph, seeds: Iterable[int], level: int) -> Multigraph:
    """Induced subgraph on the union of the seeds' ``level``-hop balls."""
    return g.induced_subgraph(khop_ball(g, seeds, level))
