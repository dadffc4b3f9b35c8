"""Apply a contingency candidate, re-solve, and classify the outcome.

Outcomes are DC-detectable only: branch overflow against RATE_A,
islanding (load- or generation-carrying buses cut off from the slack,
with the power-imbalanced components noted as slack-infeasible), or
nothing. Classification never raises; a pathologically unsolvable
post-outage system is itself classified (``slack_infeasible``).
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

from scipy.stats import spearmanr

from .dcpf import DcSolveError, IslandReport, compute_lodf, detect_islands, solve_dc
from .model import BranchKey, Network, branch_label
from .screening import nlodf_all

log = logging.getLogger(__name__)

_BALANCE_TOL_MW = 1e-6


class ViolationKind(enum.Enum):
    NONE = "none"
    OVERFLOW = "overflow"
    ISLANDING = "islanding"
    SLACK_INFEASIBLE = "slack_infeasible"


@dataclass(frozen=True)
class Overflow:
    branch: BranchKey
    loading_percent: float
    flow_mw: float
    rating_mva: float


@dataclass(frozen=True)
class ViolationReport:
    candidate: tuple[BranchKey, ...]
    kind: ViolationKind
    overflow_details: tuple[Overflow, ...] = ()
    island_details: IslandReport | None = None
    # slackless components whose net injection cannot balance without a slack
    slack_infeasible: tuple[tuple[int, ...], ...] = ()


def _component_content(net: Network, component: tuple[int, ...]) -> tuple[bool, float]:
    """Whether a component carries load or dispatched generation, and its net MW."""
    members = set(component)
    loads = [b.load_mw for b in net.buses if b.id in members and b.load_mw != 0]
    gens = [g.p_mw for g in net.generators if g.bus in members and g.p_mw != 0]
    has_content = bool(loads) or bool(gens)
    return has_content, sum(gens) - sum(loads)


def verify_candidate(
    net: Network, branches, overflow_threshold: float = 100.0
) -> ViolationReport:
    """Remove ``branches``, classify what the re-solve shows.

    Precedence: islanding (a load- or generation-carrying component lost
    the slack) short-circuits the flow check; otherwise every rated
    branch loaded strictly above ``overflow_threshold`` percent is an
    overflow; otherwise the report kind is ``none``.
    """
    outage = tuple(tuple(k) for k in branches)
    net.active_rows_for(outage)  # existence and in-service precondition
    outage_set = frozenset(outage)

    islands = detect_islands(net, outage_set)
    cut_off = []
    infeasible = []
    for component in islands.slackless:
        has_content, net_mw = _component_content(net, component)
        if has_content:
            cut_off.append(component)
            if abs(net_mw) > _BALANCE_TOL_MW:
                infeasible.append(component)
    if cut_off:
        return ViolationReport(
            candidate=outage,
            kind=ViolationKind.ISLANDING,
            island_details=islands,
            slack_infeasible=tuple(infeasible),
        )

    try:
        solution = solve_dc(net, outage_set)
    except DcSolveError:
        # unsolvable leftovers are a classification, not an error
        return ViolationReport(
            candidate=outage, kind=ViolationKind.SLACK_INFEASIBLE, island_details=islands
        )

    overflows = []
    ratings = net.active_rating
    for row, key in enumerate(net.active_keys):
        rating = ratings[row]
        if rating <= 0 or key in outage_set:
            continue
        flow = float(solution.flows[row])
        loading = abs(flow) / rating * 100.0
        if loading > overflow_threshold:
            overflows.append(
                Overflow(branch=key, loading_percent=loading, flow_mw=flow, rating_mva=rating)
            )
    overflows.sort(key=lambda o: (-o.loading_percent, o.branch))
    if overflows:
        return ViolationReport(
            candidate=outage, kind=ViolationKind.OVERFLOW, overflow_details=tuple(overflows)
        )
    return ViolationReport(candidate=outage, kind=ViolationKind.NONE)


# -- sensitivity stability across an outage sequence ------------------------


@dataclass(frozen=True)
class StabilityStep:
    """Per-branch normalized scores after one more cumulative outage."""

    outage: BranchKey | None
    nlodf_norm: dict[BranchKey, float]
    spearman_vs_prev: float | None


@dataclass(frozen=True)
class StabilityReport:
    steps: tuple[StabilityStep, ...]
    truncated: bool
    notice: str | None


def _normalized_nlodf(net: Network) -> dict[BranchKey, float]:
    values = nlodf_all(compute_lodf(net))
    peak = max(values.values(), default=0.0)
    if peak <= 0:
        return dict(values)
    return {k: v / peak for k, v in values.items()}


def lodf_stability_report(net: Network, outage_sequence) -> StabilityReport:
    """Track how per-branch normalized scores drift as outages accumulate.

    After each cumulative outage the network is restricted to the slack
    component (dropping any stranded buses and their branches), the
    sensitivity matrix is recomputed, scores are normalized by the step
    maximum, and a Spearman rank correlation against the previous step
    (over the surviving common branches) is recorded. The sequence is
    truncated with a notice if a requested branch is no longer present.
    """
    steps = [StabilityStep(None, _normalized_nlodf(net), None)]
    current = net
    truncated = False
    notice = None
    for raw in outage_sequence:
        key = tuple(raw)
        if key not in current.active_row:
            notice = (
                f"sequence truncated at {branch_label(key)}: branch not present in the "
                f"surviving network"
            )
            log.warning(notice)
            truncated = True
            break
        islands = detect_islands(current, {key})
        slack_component = next(
            comp
            for comp in islands.components
            if current.buses[current.slack_index].id in comp
        )
        current = current.restricted_to(set(slack_component), drop_branches={key})
        if not current.active_keys:
            notice = f"sequence truncated after {branch_label(key)}: no branches survive"
            log.warning(notice)
            truncated = True
            break
        values = _normalized_nlodf(current)
        prev = steps[-1].nlodf_norm
        common = sorted(set(values) & set(prev))
        before = [prev[k] for k in common]
        after = [values[k] for k in common]
        if len(common) < 2 or min(before) == max(before) or min(after) == max(after):
            rho = None  # rank correlation undefined on constant input
        else:
            rho = float(spearmanr(before, after)[0])
        steps.append(StabilityStep(outage=key, nlodf_norm=values, spearman_vs_prev=rho))
    return StabilityReport(steps=tuple(steps), truncated=truncated, notice=notice)
