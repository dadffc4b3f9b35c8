"""DC power flow, PTDF and LODF sensitivity matrices, islanding detection.

Model: lossless, angle-linear. Bus angles solve ``B' theta = P`` on the
slack bus's connected component, with the slack angle pinned to 0 and
``B'`` the nodal susceptance Laplacian built from branch series
reactances. Branch flow is ``base_mva * (theta_f - theta_t) / x``,
signed positive from the from-bus toward the to-bus.

All matrices are indexed by the canonical active-branch order of the
``Network`` (sorted branch keys), so identical networks produce
bit-identical results regardless of source-file row order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import csc_matrix
from scipy.sparse.linalg import splu

from .model import BranchKey, GcaError, Network, branch_label

# |1 - phi_ii| below this declares the branch a bridge whose outage islands
# the network; factorization noise on per-unit data sits far below it.
ISLANDING_TOL = 1e-6


class DcSolveError(GcaError):
    """The reduced susceptance system is singular or ill-posed."""


@dataclass(frozen=True)
class DcSolution:
    """Angles and flows from one DC solve.

    ``theta`` is per bus (radians, slack exactly 0, NaN outside the
    slack component). ``flows`` is MW per active branch in canonical
    order; outaged branches and branches outside the slack component
    carry 0.
    """

    theta: np.ndarray
    flows: np.ndarray
    branch_keys: tuple[BranchKey, ...]
    in_slack_component: np.ndarray

    def flows_by_key(self) -> dict[BranchKey, float]:
        return {key: float(f) for key, f in zip(self.branch_keys, self.flows)}


@dataclass(frozen=True)
class PtdfMatrix:
    """Branch x bus sensitivity: MW on the branch per MW injected at the
    bus and withdrawn at the slack. The slack column is all zeros."""

    entries: np.ndarray
    branch_keys: tuple[BranchKey, ...]
    bus_ids: tuple[int, ...]
    slack: int


@dataclass(frozen=True)
class LodfMatrix:
    """Branch x branch sensitivity: entry [k, i] is the fractional change
    of flow on monitored branch k per unit of pre-outage flow on outaged
    branch i.

    Diagonal entries are -1 by convention (the outaged line loses its own
    flow). Columns whose outage islands the network are flagged in
    ``islanding_column`` and their off-diagonal entries are NaN rather
    than silently filled.
    """

    entries: np.ndarray
    branch_keys: tuple[BranchKey, ...]
    islanding_column: np.ndarray

    @cached_property
    def _rows(self) -> dict[BranchKey, int]:
        rows: dict[BranchKey, int] = {}
        for i, k in enumerate(self.branch_keys):
            rows[k] = i
            rows.setdefault((k[1], k[0], k[2]), i)
        return rows

    def row_of(self, key: BranchKey) -> int:
        try:
            return self._rows[tuple(key)]
        except KeyError:
            raise GcaError(f"unknown branch {branch_label(tuple(key))}") from None

    def is_islanding(self, key: BranchKey) -> bool:
        return bool(self.islanding_column[self.row_of(key)])


@dataclass(frozen=True)
class IslandReport:
    """Connected components of the post-outage in-service graph.

    Components are tuples of external bus ids, sorted internally and
    ordered by their smallest member; ``slackless`` lists the components
    that do not contain the slack bus.
    """

    components: tuple[tuple[int, ...], ...]
    slackless: tuple[tuple[int, ...], ...]


def _surviving_mask(net: Network, outages) -> np.ndarray:
    """Boolean mask over active branches, False for outaged ones."""
    mask = np.ones(len(net.active_keys), dtype=bool)
    if outages:
        for row in net.active_rows_for(outages):
            mask[row] = False
    return mask


def _components(net: Network, mask: np.ndarray) -> np.ndarray:
    """Component label per bus under the surviving branch mask (union-find)."""
    n = len(net.buses)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for f, t, alive in zip(net.active_from, net.active_to, mask):
        if not alive:
            continue
        ra, rb = find(int(f)), find(int(t))
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return np.array([find(i) for i in range(n)], dtype=np.intp)


def detect_islands(net: Network, outages=frozenset()) -> IslandReport:
    """Connected components after removing ``outages`` from service."""
    labels = _components(net, _surviving_mask(net, outages))
    groups: dict[int, list[int]] = {}
    for bus_pos, root in enumerate(labels):
        groups.setdefault(int(root), []).append(bus_pos)
    components = []
    slackless = []
    slack = net.slack_index
    for root in sorted(groups):
        member_ids = tuple(net.buses[i].id for i in groups[root])
        components.append(member_ids)
        if slack not in groups[root]:
            slackless.append(member_ids)
    return IslandReport(tuple(components), tuple(slackless))


def solve_dc(net: Network, outages=frozenset()) -> DcSolution:
    """Solve the DC power flow with the given branches removed.

    Buses outside the slack component get NaN angles and their branches
    carry zero flow; islanding is a classification concern for callers,
    not an error here. Raises ``DcSolveError`` only when the reduced
    system is genuinely singular (pathological data).
    """
    mask = _surviving_mask(net, outages)
    labels = _components(net, mask)
    slack = net.slack_index
    in_comp = labels == labels[slack]

    n = len(net.buses)
    theta = np.full(n, np.nan)
    theta[slack] = 0.0

    comp_nodes = np.flatnonzero(in_comp)
    reduced_nodes = comp_nodes[comp_nodes != slack]
    if reduced_nodes.size:
        red_index = np.full(n, -1, dtype=np.intp)
        red_index[reduced_nodes] = np.arange(reduced_nodes.size)

        bsus = net.active_susceptance[mask]
        f_idx = net.active_from[mask]
        t_idx = net.active_to[mask]
        keep = in_comp[f_idx]  # a surviving branch cannot straddle components
        bsus, f_idx, t_idx = bsus[keep], f_idx[keep], t_idx[keep]

        rf, rt = red_index[f_idx], red_index[t_idx]
        rows, cols, vals = [], [], []
        both = (rf >= 0) & (rt >= 0)
        rows.append(rf[rf >= 0])
        cols.append(rf[rf >= 0])
        vals.append(bsus[rf >= 0])
        rows.append(rt[rt >= 0])
        cols.append(rt[rt >= 0])
        vals.append(bsus[rt >= 0])
        rows.append(rf[both])
        cols.append(rt[both])
        vals.append(-bsus[both])
        rows.append(rt[both])
        cols.append(rf[both])
        vals.append(-bsus[both])
        bmat = csc_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(reduced_nodes.size, reduced_nodes.size),
        )
        rhs = net.injections_mw[reduced_nodes] / net.base_mva
        try:
            lu = splu(bmat)
            theta[reduced_nodes] = lu.solve(rhs)
        except RuntimeError as exc:
            raise DcSolveError(f"singular susceptance system: {exc}") from exc
        if not np.all(np.isfinite(theta[reduced_nodes])):
            raise DcSolveError("susceptance system produced non-finite angles")

    flows = np.zeros(len(net.active_keys))
    f_all, t_all = net.active_from, net.active_to
    live = mask & in_comp[f_all]
    flows[live] = (
        net.base_mva
        * net.active_susceptance[live]
        * (theta[f_all[live]] - theta[t_all[live]])
    )
    return DcSolution(theta, flows, net.active_keys, in_comp)


def compute_ptdf(net: Network) -> PtdfMatrix:
    """Power transfer distribution factors from the reduced susceptance
    matrix, dense branch x bus."""
    base_mask = np.ones(len(net.active_keys), dtype=bool)
    labels = _components(net, base_mask)
    if not np.all(labels == labels[net.slack_index]):
        raise DcSolveError("network is not connected around the slack bus")

    n = len(net.buses)
    m = len(net.active_keys)
    slack = net.slack_index
    if n == 1 or m == 0:
        return PtdfMatrix(
            np.zeros((m, n)), net.active_keys, tuple(b.id for b in net.buses), slack
        )
    reduced_nodes = np.array([i for i in range(n) if i != slack], dtype=np.intp)
    red_index = np.full(n, -1, dtype=np.intp)
    red_index[reduced_nodes] = np.arange(n - 1)

    bsus = net.active_susceptance
    rf, rt = red_index[net.active_from], red_index[net.active_to]
    rows, cols, vals = [], [], []
    both = (rf >= 0) & (rt >= 0)
    for a, b, v in (
        (rf[rf >= 0], rf[rf >= 0], bsus[rf >= 0]),
        (rt[rt >= 0], rt[rt >= 0], bsus[rt >= 0]),
        (rf[both], rt[both], -bsus[both]),
        (rt[both], rf[both], -bsus[both]),
    ):
        rows.append(a)
        cols.append(b)
        vals.append(v)
    bmat = csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n - 1, n - 1),
    )

    # incidence transpose as dense right-hand sides: (n-1) x m
    rhs = np.zeros((n - 1, m))
    sel_f = rf >= 0
    rhs[rf[sel_f], np.flatnonzero(sel_f)] = 1.0
    sel_t = rt >= 0
    rhs[rt[sel_t], np.flatnonzero(sel_t)] -= 1.0
    try:
        sol = splu(bmat).solve(rhs)
    except RuntimeError as exc:
        raise DcSolveError(f"singular susceptance system: {exc}") from exc

    entries = np.zeros((m, n))
    entries[:, reduced_nodes] = (bsus[None, :] * sol).T
    if not np.all(np.isfinite(entries)):
        raise DcSolveError("PTDF produced non-finite entries")
    return PtdfMatrix(entries, net.active_keys, tuple(b.id for b in net.buses), slack)


def compute_lodf(net: Network) -> LodfMatrix:
    """Line outage distribution factors via the PTDF closed form.

    LODF[k, i] = phi[k, i] / (1 - phi[i, i]) where phi[., i] is the PTDF
    response to a unit from-bus -> to-bus transfer on branch i. Columns
    with phi[i, i] = 1 within ``ISLANDING_TOL`` (bridges) are flagged
    rather than filled with untrustworthy values.
    """
    ptdf = compute_ptdf(net)
    phi = ptdf.entries[:, net.active_from] - ptdf.entries[:, net.active_to]
    denom = 1.0 - np.diag(phi)
    islanding = np.abs(denom) < ISLANDING_TOL
    safe = np.where(islanding, 1.0, denom)
    entries = phi / safe[None, :]
    entries[:, islanding] = np.nan
    np.fill_diagonal(entries, -1.0)
    return LodfMatrix(entries, net.active_keys, islanding)
