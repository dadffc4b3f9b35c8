"""Contingency screening for transmission grids.

Combines group betweenness centrality over the grid multigraph with
line outage distribution factors to rank groups of lines whose joint
outage is most damaging, and checks each candidate with a DC re-solve.
"""

from .dcpf import (
    DcSolution,
    IslandReport,
    LodfMatrix,
    PtdfMatrix,
    compute_lodf,
    compute_ptdf,
    detect_islands,
    solve_dc,
)
from .graph import (
    Multigraph,
    edge_betweenness,
    edge_betweenness_all,
    group_betweenness,
    khop_subgraph,
    shortest_path_counts,
)
from .matpower import load_case, loads_case, network_to_json, pre_outage_flows, to_case_text
from .model import Branch, BranchKey, Bus, BusType, GcaError, Generator, Network
from .oracle import bruteforce_nx, naive_betweenness, naive_gbc
from .screening import (
    BranchScore,
    ContingencyCandidate,
    ScreeningConfig,
    importance_metric,
    nlodf_metric,
    screen,
    select_investigated_branches,
)
from .verify import ViolationKind, ViolationReport, lodf_stability_report, verify_candidate

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "BranchKey",
    "BranchScore",
    "Bus",
    "BusType",
    "ContingencyCandidate",
    "DcSolution",
    "GcaError",
    "Generator",
    "IslandReport",
    "LodfMatrix",
    "Multigraph",
    "Network",
    "PtdfMatrix",
    "ScreeningConfig",
    "ViolationKind",
    "ViolationReport",
    "bruteforce_nx",
    "compute_lodf",
    "compute_ptdf",
    "detect_islands",
    "edge_betweenness",
    "edge_betweenness_all",
    "group_betweenness",
    "importance_metric",
    "khop_subgraph",
    "load_case",
    "loads_case",
    "lodf_stability_report",
    "naive_betweenness",
    "naive_gbc",
    "network_to_json",
    "nlodf_metric",
    "pre_outage_flows",
    "screen",
    "select_investigated_branches",
    "shortest_path_counts",
    "solve_dc",
    "to_case_text",
    "verify_candidate",
    "__version__",
]
