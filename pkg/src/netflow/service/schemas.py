"""Request/response models for the netflow service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class GenerateGraphRequest(BaseModel):
    nodes: int = Field(ge=2)
    edges: int = Field(ge=1)
    seed: int = 0
    max_attempts: int = Field(default=1000, ge=1)


class GraphMetricsModel(BaseModel):
    max_degree: int
    diameter: int
    bipartite: bool


class GraphResponse(BaseModel):
    n: int
    edges: list[tuple[int, int]]
    metrics: GraphMetricsModel
    text: str


class MethodModel(BaseModel):
    kind: Literal["gradient", "add", "consensus", "newton"]
    order: int = Field(default=0, ge=0, description="series order for kind=add")
    inner: int = Field(default=20, ge=1, description="inner rounds for kind=consensus")
    splitting: Literal["bare", "shifted"] = "bare"


class StepModel(BaseModel):
    kind: Literal["fixed", "auto", "backtrack"] = "fixed"
    alpha: float = Field(default=1.0, gt=0)


class LineSearchModel(BaseModel):
    sigma: float = 0.1
    beta: float = 0.5
    slack: float = 1e-6
    gamma: float = 1e-8
    consensus_rounds: int = 50
    max_backtracks: int = 30


class RunTrialRequest(BaseModel):
    graph_text: Optional[str] = Field(
        default=None, description="graph in the 'n E' text format"
    )
    problem_text: Optional[str] = Field(
        default=None, description="full problem serialization; overrides cost/supply"
    )
    generate: Optional[GenerateGraphRequest] = None
    cost: Literal["quadratic", "cosh"] = "cosh"
    coefficient: float = Field(default=1.0, gt=0)
    supply: Optional[list[float]] = None
    amount: float = 1.0
    method: MethodModel
    step: StepModel = StepModel()
    linesearch: LineSearchModel = LineSearchModel()
    tol: float = Field(default=1e-10, gt=0)
    max_iters: int = Field(default=1_000_000, ge=0)
    max_rounds: int = Field(default=100_000_000, ge=0)
    include_trace: bool = True


class TrialResponse(BaseModel):
    converged: bool
    iterations: int
    rounds: int
    final_grad_norm: float
    method: str
    step: str
    centralized: bool
    backtrack_warnings: int
    per_phase_rounds: dict[str, int]
    scalars_sent: int
    final_lambda: list[float]
    trace_csv: Optional[str] = None


class SuiteRequest(BaseModel):
    config_text: str
    out_dir: str


class SummaryRowModel(BaseModel):
    n: int
    E: int
    method: str
    min_rounds: Optional[int] = None
    mean_rounds: Optional[float] = None
    max_rounds: Optional[int] = None
    median_rounds: Optional[float] = None
    converged_frac: float


class SuiteResponse(BaseModel):
    out_dir: str
    trace_files: int
    summary: list[SummaryRowModel]


class SummarizeRequest(BaseModel):
    trace_dir: str


class SummarizeResponse(BaseModel):
    summary: list[SummaryRowModel]
    csv: str
