"""Branch scoring, seed selection, neighborhoods, and the full pipeline."""

from __future__ import annotations

import numpy as np
import pytest

from gca.dcpf import compute_lodf
from gca.graph import Multigraph, edge_betweenness, khop_subgraph
from gca.matpower import loads_case, pre_outage_flows, to_case_text
from gca.model import GcaError, Network
from gca.oracle import bruteforce_nx
from gca.screening import (
    BranchScore,
    ScreeningConfig,
    build_neighborhoods,
    importance_metric,
    importance_subgraph,
    nlodf_all,
    nlodf_metric,
    screen,
    select_investigated_branches,
)


def _score(key, nlodf, pf):
    return BranchScore(branch=key, nlodf=nlodf, m=abs(pf) * min(nlodf, 1.0), pf_mw=pf)


# -- nlodf_metric -----------------------------------------------------------


def test_nlodf_worked_column():
    """abs column [0.2, 0.4, 0.6]: mean 0.4, population std 0.16330,
    raw ratio 2.449, capped at 1."""
    col = np.array([0.2, 0.4, 0.6])
    raw = float(np.mean(col) / np.std(col))
    assert raw == pytest.approx(2.449489742783178)
    from gca.screening import _column_nlodf

    assert _column_nlodf(col, islanding=False, cap=1.0) == 1.0
    assert _column_nlodf(col, islanding=False, cap=10.0) == pytest.approx(raw)


def test_nlodf_islanding_is_one(mesh6_spur):
    lodf = compute_lodf(mesh6_spur)
    assert nlodf_metric(lodf, (6, 7, "1")) == 1.0
    assert nlodf_metric(lodf, (3, 4, "1")) == 1.0


def test_nlodf_degenerate_std_is_one():
    from gca.screening import _column_nlodf

    assert _column_nlodf(np.array([0.5, 0.5]), islanding=False, cap=1.0) == 1.0


def test_nlodf_in_unit_interval(grid245, mesh6_spur, triangle):
    for net in (grid245, mesh6_spur, triangle):
        for value in nlodf_all(compute_lodf(net)).values():
            assert 0.0 <= value <= 1.0


def test_nlodf_unknown_branch(triangle):
    with pytest.raises(GcaError, match="unknown branch"):
        nlodf_metric(compute_lodf(triangle), (9, 9, "1"))


# -- importance_metric --------------------------------------------------------


KEY = (1, 2, "1")


def test_importance_arithmetic():
    scores = importance_metric({KEY: 0.4}, {KEY: 100.0})
    assert scores[KEY].m == pytest.approx(40.0)


def test_importance_caps_at_one():
    scores = importance_metric({KEY: 3.0}, {KEY: 50.0})
    assert scores[KEY].m == pytest.approx(50.0)
    assert scores[KEY].nlodf == 1.0


def test_importance_zero_flow_zero_m():
    scores = importance_metric({KEY: 0.9}, {KEY: 0.0})
    assert scores[KEY].m == 0.0


def test_importance_missing_flow():
    with pytest.raises(GcaError, match="no pre-outage flow"):
        importance_metric({KEY: 0.5}, {})


# -- select_investigated_branches ----------------------------------------------


def test_select_top_of_ten():
    keys = [(1, i, "1") for i in range(2, 12)]
    scores = {k: _score(k, 1.0, float(k[1])) for k in keys}
    cfg = ScreeningConfig(x=1, search_level=1, top_percent=10.0)
    assert select_investigated_branches(scores, cfg) == [(1, 11, "1")]


def test_select_ceil_of_245(grid245):
    flows = pre_outage_flows(grid245)
    scores = importance_metric(nlodf_all(compute_lodf(grid245)), flows)
    cfg = ScreeningConfig(x=2, search_level=3, top_percent=10.0)
    assert len(select_investigated_branches(scores, cfg)) == 25


def test_select_all_ties_prefix_deterministic():
    scores = {(1, i, "1"): _score((1, i, "1"), 1.0, 5.0) for i in range(2, 8)}
    cfg = ScreeningConfig(x=1, search_level=1, top_percent=50.0)
    picked = select_investigated_branches(scores, cfg)
    assert picked == [(1, 2, "1"), (1, 3, "1"), (1, 4, "1")]


# -- neighborhoods ---------------------------------------------------------------


def test_neighborhood_level0_is_endpoints(mesh6):
    cfg = ScreeningConfig(x=1, search_level=0)
    g = Multigraph.from_network(mesh6)
    nbhd = build_neighborhoods(g, mesh6, [(3, 4, "1")], cfg)[0]
    ids = {mesh6.buses[i].id for i in nbhd.node_set}
    assert ids == {3, 4}


def test_neighborhood_level_covers_component(mesh6):
    cfg = ScreeningConfig(x=1, search_level=10)
    g = Multigraph.from_network(mesh6)
    nbhd = build_neighborhoods(g, mesh6, [(3, 4, "1")], cfg)[0]
    assert len(nbhd.node_set) == len(mesh6.buses)


def test_neighborhood_monotone_in_level(grid245):
    g = Multigraph.from_network(grid245)
    seed = [(1, 2, "1")]
    previous = frozenset()
    for level in range(0, 7):
        cfg = ScreeningConfig(x=2, search_level=level)
        nbhd = build_neighborhoods(g, grid245, seed, cfg)[0]
        assert previous <= nbhd.node_set
        previous = nbhd.node_set


# -- importance_subgraph ----------------------------------------------------------


def test_candidate_x1_scores_edge_betweenness(mesh6):
    flows = pre_outage_flows(mesh6)
    scores = importance_metric(nlodf_all(compute_lodf(mesh6)), flows)
    cfg = ScreeningConfig(x=1, search_level=2)
    g = Multigraph.from_network(mesh6)
    nbhd = build_neighborhoods(g, mesh6, [(3, 4, "1")], cfg)[0]
    cand = importance_subgraph(nbhd, scores, cfg)
    assert cand.branches == ((3, 4, "1"),)
    assert cand.gbc_score == edge_betweenness(nbhd.subgraph, (3, 4, "1"))


def test_candidate_skipped_when_too_few_edges(mesh6, caplog):
    flows = pre_outage_flows(mesh6)
    scores = importance_metric(nlodf_all(compute_lodf(mesh6)), flows)
    cfg = ScreeningConfig(x=3, search_level=0)
    g = Multigraph.from_network(mesh6)
    nbhd = build_neighborhoods(g, mesh6, [(3, 4, "1")], cfg)[0]
    with caplog.at_level("INFO", logger="gca.screening"):
        assert importance_subgraph(nbhd, scores, cfg) is None
    assert "fewer than x" in caplog.text


def test_candidate_group_scored_on_subgraph(corridor_net):
    flows = pre_outage_flows(corridor_net)
    scores = importance_metric(nlodf_all(compute_lodf(corridor_net)), flows)
    cfg = ScreeningConfig(x=2, search_level=1)
    g = Multigraph.from_network(corridor_net)
    nbhd = build_neighborhoods(g, corridor_net, [(1, 2, "1")], cfg)[0]
    cand = importance_subgraph(nbhd, scores, cfg)
    assert set(cand.branches) == {(1, 2, "1"), (1, 2, "2")}


# -- screen -----------------------------------------------------------------------


def test_screen_x1_heavy_bridge_ranks_first(mesh6):
    """Brute force agrees the tie line is the worst single outage, and the
    pipeline puts it first."""
    worst = bruteforce_nx(mesh6, 1)
    assert [tuple(r.candidate[0]) for r in worst] == [(3, 4, "1")]
    cands = screen(mesh6, ScreeningConfig(x=1, search_level=2, top_percent=50.0))
    assert cands[0].branches == ((3, 4, "1"),)


def test_screen_x1_scores_equal_edge_betweenness(mesh14):
    cfg = ScreeningConfig(x=1, search_level=2, top_percent=30.0)
    g = Multigraph.from_network(mesh14)
    for cand in screen(mesh14, cfg):
        seeds = [
            mesh14.bus_index[cand.source_neighborhood[0]],
            mesh14.bus_index[cand.source_neighborhood[1]],
        ]
        sub = khop_subgraph(g, seeds, cfg.search_level)
        assert cand.gbc_score == edge_betweenness(sub, cand.branches[0])


def test_screen_merges_duplicate_candidates(corridor_net):
    cands = screen(corridor_net, ScreeningConfig(x=2, search_level=1, top_percent=100.0))
    groups = [frozenset(c.branches) for c in cands]
    assert len(groups) == len(set(groups))


def test_screen_ranked_descending(grid245):
    cands = screen(grid245, ScreeningConfig(x=2, search_level=3))
    scores = [c.gbc_score for c in cands]
    assert scores == sorted(scores, reverse=True)


def test_screen_invariant_under_branch_permutation(mesh14):
    """Same network with shuffled branch rows screens identically."""
    import random

    rows = list(mesh14.branches)
    random.Random(11).shuffle(rows)
    reordered = Network(mesh14.buses, tuple(rows), mesh14.generators, mesh14.base_mva)
    shuffled = loads_case(to_case_text(reordered))
    cfg = ScreeningConfig(x=2, search_level=2, top_percent=20.0)
    a = screen(mesh14, cfg)
    b = screen(shuffled, cfg)
    assert [(c.branches, c.gbc_score) for c in a] == [(c.branches, c.gbc_score) for c in b]


def test_screen_parallel_jobs_identical(mesh14):
    cfg = ScreeningConfig(x=2, search_level=2, top_percent=30.0)
    serial = screen(mesh14, cfg, jobs=1)
    parallel = screen(mesh14, cfg, jobs=2)
    assert serial == parallel


def test_legacy_path_count_mode(corridor_net):
    cfg = ScreeningConfig(x=2, search_level=1, legacy_path_count=True)
    cands = screen(corridor_net, cfg)
    assert cands and all(c.gbc_score >= 0 for c in cands)


def test_config_validation():
    with pytest.raises(GcaError):
        ScreeningConfig(x=0, search_level=1)
    with pytest.raises(GcaError):
        ScreeningConfig(x=1, search_level=-1)
    with pytest.raises(GcaError):
        ScreeningConfig(x=1, search_level=1, top_percent=0.0)
    with pytest.raises(GcaError):
        ScreeningConfig(x=1, search_level=1, top_percent=101.0)
