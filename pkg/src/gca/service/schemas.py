"""Request and response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator


class CaseLoadRequest(BaseModel):
    """Load a case from a server-side path or from inline case text."""

    path: str | None = None
    case_text: str | None = None
    name: str | None = None

    @model_validator(mode="after")
    def _exactly_one_source(self):
        if (self.path is None) == (self.case_text is None):
            raise ValueError("provide exactly one of 'path' or 'case_text'")
        return self


class CaseSummary(BaseModel):
    case_id: str
    name: str
    base_mva: float
    n_buses: int
    n_branches: int
    n_branches_in_service: int
    n_generators: int


class ScreenRequest(BaseModel):
    x: int = Field(ge=1)
    search_level: int = Field(ge=0)
    top_percent: float = Field(default=10.0, gt=0, le=100)
    nlodf_cap: float = Field(default=1.0, gt=0)
    legacy_path_count: bool = False


class Candidate(BaseModel):
    branches: list[str]
    gbc_score: float
    seed_branch: str
    neighborhood_size: int


class ScreenResponse(BaseModel):
    case_id: str
    x: int
    search_level: int
    candidates: list[Candidate]


class VerifyRequest(BaseModel):
    branches: list[str] = Field(min_length=1, description="from-to-circuit triples")
    overflow_threshold: float = Field(default=100.0, gt=0)


class OverflowDetail(BaseModel):
    branch: str
    loading_percent: float
    flow_mw: float
    rating_mva: float


class IslandDetail(BaseModel):
    components: list[list[int]]
    slackless: list[list[int]]


class VerifyResponse(BaseModel):
    case_id: str
    candidate: list[str]
    kind: str
    overflow_details: list[OverflowDetail]
    island_details: IslandDetail | None
    slack_infeasible: list[list[int]]


class BruteforceRequest(BaseModel):
    x: int = Field(ge=1, le=2)
    overflow_threshold: float = Field(default=100.0, gt=0)
    jobs: int = Field(default=1, ge=1)


class BruteforceResponse(BaseModel):
    case_id: str
    x: int
    violations: list[VerifyResponse]


class StabilityRequest(BaseModel):
    sequence: list[str] = Field(min_length=0, description="from-to-circuit triples, in order")


class StabilityStepModel(BaseModel):
    outage: str | None
    nlodf_norm: dict[str, float]
    spearman_vs_prev: float | None


class StabilityResponse(BaseModel):
    case_id: str
    steps: list[StabilityStepModel]
    truncated: bool
    notice: str | None
