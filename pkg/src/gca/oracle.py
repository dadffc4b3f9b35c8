"""Brute-force and naive reference implementations used for validation.

These are deliberately literal: the centrality oracles enumerate actual
shortest paths as edge sequences, and the outage oracle re-solves every
subset. They exist to check the fast implementations, so they must stay
independent of them; keep any cleverness out.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations
from math import comb

from .graph import EdgeKey, GraphError, Multigraph
from .model import GcaError, Network
from .parallel import parallel_map
from .verify import ViolationKind, ViolationReport, verify_candidate

_MAX_ORACLE_NODES = 14
_MAX_BRUTEFORCE_SUBSETS = 10_000_000


def _bfs_distances(g: Multigraph, s: int) -> dict[int, int]:
    dist = {s: 0}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        for _, w in g.adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def all_shortest_paths(g: Multigraph, s: int, t: int) -> list[tuple[EdgeKey, ...]]:
    """Every shortest s-t path as an explicit edge-key sequence.

    A plain forward walk along edges that make hop progress toward t,
    using its own BFS distances; deliberately shares no machinery with
    the fast centrality code it checks. Exponential in the worst case;
    guarded by the callers' size limits.
    """
    dist = _bfs_distances(g, s)
    if t not in dist:
        return []
    if s == t:
        return [()]
    target = dist[t]
    paths: list[tuple[EdgeKey, ...]] = []
    stack: list[tuple[int, tuple[EdgeKey, ...]]] = [(s, ())]
    while stack:
        node, prefix = stack.pop()
        if node == t:
            paths.append(prefix)
            continue
        for eidx, w in g.adj[node]:
            if dist.get(w) == len(prefix) + 1 and dist[w] <= target:
                stack.append((w, prefix + (g.edges[eidx][0],)))
    return paths


def _guard_size(g: Multigraph) -> None:
    if len(g.nodes) > _MAX_ORACLE_NODES:
        raise GraphError(
            f"naive enumeration is guarded to {_MAX_ORACLE_NODES} nodes, "
            f"got {len(g.nodes)}"
        )


def naive_betweenness(g: Multigraph, e: EdgeKey) -> float:
    """Edge betweenness by literal enumeration of all shortest paths."""
    _guard_size(g)
    if not g.has_edge(e):
        raise GraphError(f"unknown edge {e!r}")
    total = 0.0
    for s, t in combinations(g.nodes, 2):
        paths = all_shortest_paths(g, s, t)
        if not paths:
            continue
        total += sum(1 for p in paths if e in p) / len(paths)
    return total


def naive_gbc(g: Multigraph, group) -> float:
    """Group betweenness by literal enumeration of all shortest paths."""
    _guard_size(g)
    members = frozenset(group)
    if not members:
        raise GraphError("edge group is empty")
    unknown = members - g.edge_keys
    if unknown:
        raise GraphError(f"edge group contains unknown edges {sorted(map(repr, unknown))}")
    total = 0.0
    for s, t in combinations(g.nodes, 2):
        paths = all_shortest_paths(g, s, t)
        if not paths:
            continue
        total += sum(1 for p in paths if members & set(p)) / len(paths)
    return total


def bruteforce_nx(
    net: Network, x: int, overflow_threshold: float = 100.0, jobs: int = 1
) -> list[ViolationReport]:
    """Verify every x-subset of in-service branches, x in {1, 2}.

    Returns only the subsets whose report is not ``none``, sorted by
    overflow count descending, then by branch keys. Refuses instances
    beyond ten million subsets.
    """
    if x not in (1, 2):
        raise GcaError(f"brute force supports x in {{1, 2}}, got {x}")
    m = len(net.active_keys)
    subsets = comb(m, x)
    if subsets > _MAX_BRUTEFORCE_SUBSETS:
        raise GcaError(
            f"refusing brute force over {subsets} subsets "
            f"(guard: C(|E|, x) <= {_MAX_BRUTEFORCE_SUBSETS})"
        )
    combos = list(combinations(net.active_keys, x))
    if jobs > 1:
        reports = parallel_map(
            _verify_one, [(net, combo, overflow_threshold) for combo in combos], jobs
        )
    else:
        reports = [verify_candidate(net, combo, overflow_threshold) for combo in combos]
    hits = [r for r in reports if r.kind is not ViolationKind.NONE]
    hits.sort(key=lambda r: (-len(r.overflow_details), tuple(sorted(r.candidate))))
    return hits


def _verify_one(args) -> ViolationReport:
    net, combo, threshold = args
    return verify_candidate(net, combo, threshold)
