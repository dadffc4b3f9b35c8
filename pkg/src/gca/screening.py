"""Candidate screening pipeline.

Per-branch importance combines topology and physics: the column of
outage sensitivities a branch induces on the rest of the grid is
condensed into a normalized score (mean over std of the absolute
off-diagonal column, capped at 1, forced to 1 for islanding branches),
then scaled by the branch's base-case MW flow. The top slice of branches
by that score seeds breadth-first neighborhoods; inside each
neighborhood the x highest-scoring branches form a candidate group
scored by group betweenness centrality on the neighborhood subgraph.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .dcpf import LodfMatrix, compute_lodf
from .graph import Multigraph, group_betweenness, khop_subgraph, representative_path_count
from .matpower import pre_outage_flows
from .model import BranchKey, GcaError, Network, branch_label

log = logging.getLogger(__name__)

# population std below this means a perfectly uniform impact column
_DEGENERATE_STD = 1e-12


@dataclass(frozen=True)
class BranchScore:
    """Per-branch screening score: ``m = |pf_mw| * min(nlodf, cap)``."""

    branch: BranchKey
    nlodf: float
    m: float
    pf_mw: float


@dataclass(frozen=True)
class Neighborhood:
    seed_branch: BranchKey
    node_set: frozenset[int]
    subgraph: Multigraph


@dataclass(frozen=True)
class ContingencyCandidate:
    branches: tuple[BranchKey, ...]
    gbc_score: float
    source_neighborhood: BranchKey
    neighborhood_size: int


@dataclass(frozen=True)
class ScreeningConfig:
    """Knobs for one screening run.

    ``x`` is the contingency order, ``search_level`` the hop radius of
    the neighborhoods, ``top_percent`` the slice of branches kept as
    seeds, ``nlodf_cap`` the saturation value of the normalized score,
    and ``legacy_path_count`` switches the group score to the halved
    representative-path count for A/B comparison.
    """

    x: int
    search_level: int
    top_percent: float = 10.0
    nlodf_cap: float = 1.0
    legacy_path_count: bool = False

    def __post_init__(self) -> None:
        if self.x < 1:
            raise GcaError(f"x must be >= 1, got {self.x}")
        if self.search_level < 0:
            raise GcaError(f"search_level must be >= 0, got {self.search_level}")
        if not (0 < self.top_percent <= 100):
            raise GcaError(f"top_percent must be in (0, 100], got {self.top_percent}")
        if self.nlodf_cap <= 0:
            raise GcaError(f"nlodf_cap must be > 0, got {self.nlodf_cap}")


def _column_nlodf(abs_offdiag: np.ndarray, islanding: bool, cap: float) -> float:
    if islanding:
        return 1.0
    if abs_offdiag.size == 0:
        return 1.0
    std = float(np.std(abs_offdiag))  # population std: the column is the population
    if std < _DEGENERATE_STD:
        return 1.0
    return min(float(np.mean(abs_offdiag)) / std, cap)


def nlodf_metric(lodf: LodfMatrix, branch: BranchKey, cap: float = 1.0) -> float:
    """Normalized outage-impact score of one branch's LODF column.

    Mean over population standard deviation of the absolute off-diagonal
    column entries, capped at ``cap``. Islanding branches score exactly 1,
    as does a perfectly uniform column (std below 1e-12): impact spread
    evenly over every other line is what the metric is built to flag.
    """
    i = lodf.row_of(branch)
    col = np.abs(lodf.entries[:, i])
    offdiag = np.delete(col, i)
    return _column_nlodf(offdiag, bool(lodf.islanding_column[i]), cap)


def nlodf_all(lodf: LodfMatrix, cap: float = 1.0) -> dict[BranchKey, float]:
    """``nlodf_metric`` for every branch, in canonical branch order."""
    out: dict[BranchKey, float] = {}
    col = np.abs(lodf.entries)
    for i, key in enumerate(lodf.branch_keys):
        offdiag = np.delete(col[:, i], i)
        out[key] = _column_nlodf(offdiag, bool(lodf.islanding_column[i]), cap)
    return out


def importance_metric(
    nlodf_by_branch: Mapping[BranchKey, float],
    flows: Mapping[BranchKey, float],
    cap: float = 1.0,
) -> dict[BranchKey, BranchScore]:
    """Flow-weighted importance per branch: ``|pf| * min(nlodf, cap)``."""
    scores: dict[BranchKey, BranchScore] = {}
    for key, raw in nlodf_by_branch.items():
        if key not in flows:
            raise GcaError(f"no pre-outage flow for branch {branch_label(key)}")
        pf = flows[key]
        capped = min(raw, cap)
        scores[key] = BranchScore(branch=key, nlodf=capped, m=abs(pf) * capped, pf_mw=pf)
    return scores


def _score_order(score: BranchScore) -> tuple[float, float, BranchKey]:
    # descending m, then descending |pf|, then ascending key
    return (-score.m, -abs(score.pf_mw), score.branch)


def select_investigated_branches(
    scores: Mapping[BranchKey, BranchScore], cfg: ScreeningConfig
) -> list[BranchKey]:
    """Top ``ceil(top_percent%)`` branches by importance, deterministic ties."""
    if not scores:
        raise GcaError("no branch scores to select from")
    keep = math.ceil(cfg.top_percent / 100.0 * len(scores))
    ranked = sorted(scores.values(), key=_score_order)
    return [s.branch for s in ranked[:keep]]


def build_neighborhoods(
    g: Multigraph, net: Network, investigated: list[BranchKey], cfg: ScreeningConfig
) -> list[Neighborhood]:
    """One breadth-first neighborhood per investigated branch: the union of
    the ``search_level``-hop balls around both endpoints, as an induced
    subgraph."""
    if not investigated:
        raise GcaError("investigated branch list is empty")
    neighborhoods = []
    for key in investigated:
        br = net.branches[net.resolve_branch(key)]
        seeds = (net.bus_index[br.from_bus], net.bus_index[br.to_bus])
        sub = khop_subgraph(g, seeds, cfg.search_level)
        neighborhoods.append(
            Neighborhood(seed_branch=br.key, node_set=frozenset(sub.nodes), subgraph=sub)
        )
    return neighborhoods


def importance_subgraph(
    nbhd: Neighborhood,
    scores: Mapping[BranchKey, BranchScore],
    cfg: ScreeningConfig,
) -> ContingencyCandidate | None:
    """Form and score one candidate group inside a neighborhood.

    The group is the x highest-importance edges of the neighborhood
    subgraph; its score is the group betweenness centrality computed on
    that subgraph. Returns None (with a logged notice) when the subgraph
    has fewer than x edges.
    """
    edge_keys = [key for (key, _, _) in nbhd.subgraph.edges]
    if len(edge_keys) < cfg.x:
        log.info(
            "neighborhood of %s has %d edges, fewer than x=%d; skipped",
            branch_label(nbhd.seed_branch),
            len(edge_keys),
            cfg.x,
        )
        return None
    edge_keys.sort(key=lambda k: _score_order(scores[k]))
    chosen = tuple(edge_keys[: cfg.x])
    if cfg.legacy_path_count:
        score = representative_path_count(nbhd.subgraph, chosen)
    else:
        score = group_betweenness(nbhd.subgraph, chosen)
    return ContingencyCandidate(
        branches=chosen,
        gbc_score=score,
        source_neighborhood=nbhd.seed_branch,
        neighborhood_size=len(nbhd.node_set),
    )


def screen(net: Network, cfg: ScreeningConfig, jobs: int = 1) -> list[ContingencyCandidate]:
    """Full pipeline: flows, outage sensitivities, branch scores, seed
    selection, neighborhoods, per-neighborhood candidates.

    Duplicate candidates (the same branch set reached from different
    neighborhoods) are merged keeping the highest score; the result is
    ranked by score descending with branch-key tie-breaks. Output is
    deterministic for a given network and config at any ``jobs`` value.
    """
    flows = pre_outage_flows(net)
    lodf = compute_lodf(net)
    scores = importance_metric(nlodf_all(lodf, cfg.nlodf_cap), flows, cfg.nlodf_cap)
    investigated = select_investigated_branches(scores, cfg)
    g = Multigraph.from_network(net)
    neighborhoods = build_neighborhoods(g, net, investigated, cfg)

    if jobs > 1 and len(neighborhoods) > 1:
        from .parallel import parallel_map

        candidates = parallel_map(
            _scored_candidate, [(nb, scores, cfg) for nb in neighborhoods], jobs
        )
    else:
        candidates = [importance_subgraph(nb, scores, cfg) for nb in neighborhoods]

    merged: dict[frozenset, ContingencyCandidate] = {}
    for cand in candidates:
        if cand is None:
            continue
        group = frozenset(cand.branches)
        best = merged.get(group)
        if best is None or cand.gbc_score > best.gbc_score:
            merged[group] = cand
    ranked = sorted(
        merged.values(), key=lambda c: (-c.gbc_score, tuple(sorted(c.branches)))
    )
    return ranked


def _scored_candidate(args) -> ContingencyCandidate | None:
    nbhd, scores, cfg = args
    return importance_subgraph(nbhd, scores, cfg)
