"""HTTP service wrapping the screening library.

A loaded case is held in memory (keyed by a content hash), so repeated
screening, verification, and sensitivity queries against the same grid
skip re-parsing and reuse the cached sensitivity matrix. The CLI covers
the same operations in one-shot form; this service is for long-running,
multi-client use.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import __version__, report
from ..dcpf import LodfMatrix, compute_lodf
from ..matpower import load_case, loads_case, network_to_dict, network_to_json
from ..model import GcaError, Network, parse_branch_label
from ..oracle import bruteforce_nx
from ..screening import ScreeningConfig, screen
from ..verify import lodf_stability_report, verify_candidate
from . import schemas


@dataclass
class _LoadedCase:
    network: Network
    lodf: LodfMatrix | None = None


class CaseRegistry:
    """Content-addressed store of loaded networks, safe for concurrent use."""

    def __init__(self) -> None:
        self._cases: dict[str, _LoadedCase] = {}
        self._lock = threading.Lock()

    def add(self, net: Network) -> str:
        case_id = hashlib.sha256(network_to_json(net).encode()).hexdigest()[:16]
        with self._lock:
            self._cases.setdefault(case_id, _LoadedCase(net))
        return case_id

    def get(self, case_id: str) -> _LoadedCase:
        with self._lock:
            case = self._cases.get(case_id)
        if case is None:
            raise HTTPException(status_code=404, detail=f"unknown case {case_id}")
        return case

    def drop(self, case_id: str) -> None:
        with self._lock:
            if case_id not in self._cases:
                raise HTTPException(status_code=404, detail=f"unknown case {case_id}")
            del self._cases[case_id]

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._cases)

    def lodf_for(self, case_id: str) -> LodfMatrix:
        case = self.get(case_id)
        with self._lock:
            if case.lodf is None:
                case.lodf = compute_lodf(case.network)
            return case.lodf


def _summary(case_id: str, net: Network) -> schemas.CaseSummary:
    return schemas.CaseSummary(
        case_id=case_id,
        name=net.name,
        base_mva=net.base_mva,
        n_buses=len(net.buses),
        n_branches=len(net.branches),
        n_branches_in_service=len(net.active_keys),
        n_generators=len(net.generators),
    )


def _parse_keys(labels: list[str]) -> list:
    return [parse_branch_label(label) for label in labels]


def _verify_response(case_id: str, result) -> schemas.VerifyResponse:
    payload = report.violation_to_dict(result)
    return schemas.VerifyResponse(case_id=case_id, **payload)


def create_app() -> FastAPI:
    app = FastAPI(title="gca", version=__version__)
    registry = CaseRegistry()

    @app.exception_handler(GcaError)
    async def _domain_error(_, exc: GcaError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/cases", response_model=schemas.CaseSummary)
    def load(request: schemas.CaseLoadRequest):
        if request.path is not None:
            if not Path(request.path).is_file():
                raise HTTPException(status_code=400, detail=f"case file not found: {request.path}")
            net = load_case(request.path)
        else:
            net = loads_case(request.case_text, name=request.name)
        case_id = registry.add(net)
        return _summary(case_id, net)

    @app.get("/cases", response_model=list[schemas.CaseSummary])
    def list_cases():
        return [_summary(cid, registry.get(cid).network) for cid in registry.ids()]

    @app.delete("/cases/{case_id}")
    def drop(case_id: str):
        registry.drop(case_id)
        return {"dropped": case_id}

    @app.get("/cases/{case_id}/network")
    def network(case_id: str):
        return network_to_dict(registry.get(case_id).network)

    @app.get("/cases/{case_id}/lodf")
    def lodf(case_id: str, format: str = Query("json", pattern="^(json|csv)$")):
        matrix = registry.lodf_for(case_id)
        if format == "csv":
            return PlainTextResponse(report.lodf_to_csv(matrix), media_type="text/csv")
        return report.lodf_to_dict(matrix)

    @app.post("/cases/{case_id}/screen", response_model=schemas.ScreenResponse)
    def run_screen(case_id: str, request: schemas.ScreenRequest):
        net = registry.get(case_id).network
        cfg = ScreeningConfig(
            x=request.x,
            search_level=request.search_level,
            top_percent=request.top_percent,
            nlodf_cap=request.nlodf_cap,
            legacy_path_count=request.legacy_path_count,
        )
        candidates = screen(net, cfg)
        return schemas.ScreenResponse(
            case_id=case_id,
            x=request.x,
            search_level=request.search_level,
            candidates=[schemas.Candidate(**report.candidate_to_dict(c)) for c in candidates],
        )

    @app.post("/cases/{case_id}/verify", response_model=schemas.VerifyResponse)
    def run_verify(case_id: str, request: schemas.VerifyRequest):
        net = registry.get(case_id).network
        result = verify_candidate(
            net, _parse_keys(request.branches), overflow_threshold=request.overflow_threshold
        )
        return _verify_response(case_id, result)

    @app.post("/cases/{case_id}/bruteforce", response_model=schemas.BruteforceResponse)
    def run_bruteforce(case_id: str, request: schemas.BruteforceRequest):
        net = registry.get(case_id).network
        results = bruteforce_nx(
            net, request.x, overflow_threshold=request.overflow_threshold, jobs=request.jobs
        )
        return schemas.BruteforceResponse(
            case_id=case_id,
            x=request.x,
            violations=[_verify_response(case_id, r) for r in results],
        )

    @app.post("/cases/{case_id}/stability", response_model=schemas.StabilityResponse)
    def run_stability(case_id: str, request: schemas.StabilityRequest):
        net = registry.get(case_id).network
        result = lodf_stability_report(net, _parse_keys(request.sequence))
        payload = report.stability_to_dict(result)
        return schemas.StabilityResponse(case_id=case_id, **payload)

    return app


app = create_app()
