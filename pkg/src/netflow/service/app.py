"""FastAPI application exposing the netflow operations."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import NetflowError
from . import handlers
from .schemas import (
    GenerateGraphRequest,
    GraphResponse,
    HealthResponse,
    RunTrialRequest,
    SuiteRequest,
    SuiteResponse,
    SummarizeRequest,
    SummarizeResponse,
    TrialResponse,
)

app = FastAPI(
    title="netflow",
    description="Distributed dual-descent network-flow solvers with "
    "communication metering",
)


@app.exception_handler(NetflowError)
async def netflow_error_handler(request: Request, exc: NetflowError):
    return JSONResponse(
        status_code=422,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


@app.exception_handler(ValueError)
async def value_error_handler(request: Request, exc: ValueError):
    return JSONResponse(
        status_code=400,
        content={"error": "ValueError", "detail": str(exc)},
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return handlers.health()


@app.post("/graphs/generate", response_model=GraphResponse)
def generate_graph(request: GenerateGraphRequest) -> GraphResponse:
    return handlers.generate_graph(request)


@app.post("/trials/run", response_model=TrialResponse)
def run_trial(request: RunTrialRequest) -> TrialResponse:
    return handlers.run_single_trial(request)


@app.post("/suites/run", response_model=SuiteResponse)
def run_suite(request: SuiteRequest) -> SuiteResponse:
    return handlers.run_experiment_suite(request)


@app.post("/summaries/compute", response_model=SummarizeResponse)
def summarize(request: SummarizeRequest) -> SummarizeResponse:
    return handlers.summarize_traces(request)
