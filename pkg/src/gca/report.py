"""Deterministic JSON/CSV rendering of results.

Branch identity in every output is the external ``from-to-circuit``
triple, never an internal index. Two runs over the same inputs must
produce byte-identical text.
"""

from __future__ import annotations

import json

from .dcpf import LodfMatrix
from .model import branch_label
from .screening import ContingencyCandidate
from .verify import StabilityReport, ViolationReport


def to_json(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def candidate_to_dict(c: ContingencyCandidate) -> dict:
    return {
        "branches": [branch_label(k) for k in c.branches],
        "gbc_score": c.gbc_score,
        "seed_branch": branch_label(c.source_neighborhood),
        "neighborhood_size": c.neighborhood_size,
    }


def candidates_to_json(candidates: list[ContingencyCandidate]) -> str:
    return to_json([candidate_to_dict(c) for c in candidates])


def candidates_to_csv(candidates: list[ContingencyCandidate]) -> str:
    lines = ["rank,branches,gbc_score,seed_branch,neighborhood_size"]
    for rank, c in enumerate(candidates, start=1):
        branches = ";".join(branch_label(k) for k in c.branches)
        lines.append(
            f"{rank},{branches},{c.gbc_score!r},{branch_label(c.source_neighborhood)},"
            f"{c.neighborhood_size}"
        )
    return "\n".join(lines) + "\n"


def violation_to_dict(report: ViolationReport) -> dict:
    out = {
        "candidate": [branch_label(k) for k in report.candidate],
        "kind": report.kind.value,
        "overflow_details": [
            {
                "branch": branch_label(o.branch),
                "loading_percent": o.loading_percent,
                "flow_mw": o.flow_mw,
                "rating_mva": o.rating_mva,
            }
            for o in report.overflow_details
        ],
    }
    if report.island_details is not None:
        out["island_details"] = {
            "components": [list(c) for c in report.island_details.components],
            "slackless": [list(c) for c in report.island_details.slackless],
        }
    else:
        out["island_details"] = None
    out["slack_infeasible"] = [list(c) for c in report.slack_infeasible]
    return out


def violation_to_json(report: ViolationReport) -> str:
    return to_json(violation_to_dict(report))


def violations_to_json(reports: list[ViolationReport]) -> str:
    return to_json([violation_to_dict(r) for r in reports])


def lodf_to_csv(lodf: LodfMatrix) -> str:
    """Matrix CSV: rows are monitored branches, columns outaged branches.

    Every cell of a column whose outage islands the network is the
    marker ``ISL``; numeric cells use ``repr`` so nothing is rounded.
    """
    labels = [branch_label(k) for k in lodf.branch_keys]
    lines = ["monitored\\outaged," + ",".join(labels)]
    for i, row_label in enumerate(labels):
        cells = [row_label]
        for j in range(len(labels)):
            if lodf.islanding_column[j]:
                cells.append("ISL")
            else:
                cells.append(repr(float(lodf.entries[i, j])))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def lodf_to_dict(lodf: LodfMatrix) -> dict:
    labels = [branch_label(k) for k in lodf.branch_keys]
    return {
        "branches": labels,
        "islanding_columns": [labels[j] for j in range(len(labels)) if lodf.islanding_column[j]],
        "entries": [
            [None if lodf.islanding_column[j] and i != j else float(lodf.entries[i, j])
             for j in range(len(labels))]
            for i in range(len(labels))
        ],
    }


def stability_to_dict(report: StabilityReport) -> dict:
    return {
        "steps": [
            {
                "outage": branch_label(s.outage) if s.outage is not None else None,
                "nlodf_norm": {branch_label(k): v for k, v in sorted(s.nlodf_norm.items())},
                "spearman_vs_prev": s.spearman_vs_prev,
            }
            for s in report.steps
        ],
        "truncated": report.truncated,
        "notice": report.notice,
    }


def stability_to_csv(report: StabilityReport) -> str:
    """Two sections: the step-by-branch normalized table, then the
    consecutive-step rank correlations."""
    all_keys = sorted({k for s in report.steps for k in s.nlodf_norm})
    header = "branch," + ",".join(f"step_{i}" for i in range(len(report.steps)))
    lines = [header]
    for key in all_keys:
        cells = [branch_label(key)]
        for step in report.steps:
            v = step.nlodf_norm.get(key)
            cells.append("" if v is None else repr(v))
        lines.append(",".join(cells))
    lines.append("")
    lines.append("step,outage,spearman_vs_prev")
    for i, step in enumerate(report.steps):
        outage = branch_label(step.outage) if step.outage is not None else ""
        rho = "" if step.spearman_vs_prev is None else repr(step.spearman_vs_prev)
        lines.append(f"{i},{outage},{rho}")
    if report.notice:
        lines.append(f"# {report.notice}")
    return "\n".join(lines) + "\n"


def bench_to_csv(rows: list[dict]) -> str:
    lines = ["x,search_level,rep,seconds,median_seconds"]
    for row in rows:
        lines.append(
            f"{row['x']},{row['search_level']},{row['rep']},"
            f"{row['seconds']:.6f},{row['median_seconds']:.6f}"
        )
    return "\n".join(lines) + "\n"
