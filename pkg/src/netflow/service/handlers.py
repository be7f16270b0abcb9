"""Service operations, independent of the HTTP layer.

Each handler maps a request model to a response model using the core
package; the FastAPI app and the CLI both call these directly.
"""

from __future__ import annotations

import numpy as np

from .. import __version__
from ..directions import AddN, ConsensusNewton, ExactNewton, Gradient
from ..experiments import (
    SummaryRow,
    parse_suite_config,
    run_suite,
    summarize,
    summary_to_csv,
)
from ..flow import (
    make_problem,
    place_source_sink,
    problem_from_text,
    uniform_costs,
)
from ..graph import graph_from_text, graph_to_text, metrics, random_connected_graph
from ..linesearch import Backtracking, FixedStep, LineSearchConfig
from ..simulator import run_trial, safe_gradient_step, trace_to_csv
from .schemas import (
    GenerateGraphRequest,
    GraphMetricsModel,
    GraphResponse,
    HealthResponse,
    RunTrialRequest,
    SuiteRequest,
    SuiteResponse,
    SummarizeRequest,
    SummarizeResponse,
    SummaryRowModel,
    TrialResponse,
)


def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


def generate_graph(request: GenerateGraphRequest) -> GraphResponse:
    graph = random_connected_graph(
        request.nodes, request.edges, request.seed, request.max_attempts
    )
    m = metrics(graph)
    return GraphResponse(
        n=graph.n,
        edges=list(graph.edges),
        metrics=GraphMetricsModel(
            max_degree=m.max_degree, diameter=m.diameter, bipartite=m.bipartite
        ),
        text=graph_to_text(graph),
    )


def _build_method(request: RunTrialRequest):
    m = request.method
    if m.kind == "gradient":
        return Gradient()
    if m.kind == "add":
        return AddN(m.order)
    if m.kind == "consensus":
        return ConsensusNewton(m.inner, m.splitting)
    return ExactNewton()


def _build_problem(request: RunTrialRequest):
    if request.problem_text is not None:
        return problem_from_text(request.problem_text)
    if request.graph_text is not None:
        graph = graph_from_text(request.graph_text)
    elif request.generate is not None:
        gen = request.generate
        graph = random_connected_graph(gen.nodes, gen.edges, gen.seed, gen.max_attempts)
    else:
        raise ValueError("provide graph_text, problem_text, or generate")
    costs = uniform_costs(graph, request.cost, request.coefficient)
    if request.supply is not None:
        b = np.array(request.supply, dtype=float)
    else:
        b = place_source_sink(graph, request.amount)
    return make_problem(graph, costs, b)


def run_single_trial(request: RunTrialRequest) -> TrialResponse:
    problem = _build_problem(request)
    method = _build_method(request)
    ls = request.linesearch
    if request.step.kind == "backtrack":
        step = Backtracking(
            LineSearchConfig(
                sigma=ls.sigma,
                beta=ls.beta,
                slack=ls.slack,
                gamma=ls.gamma,
                consensus_rounds=ls.consensus_rounds,
                max_backtracks=ls.max_backtracks,
            )
        )
    elif request.step.kind == "auto":
        step = FixedStep(safe_gradient_step(problem))
    else:
        step = FixedStep(request.step.alpha)
    report = run_trial(
        problem,
        method,
        step,
        tol=request.tol,
        max_iters=request.max_iters,
        max_rounds=request.max_rounds,
    )
    return TrialResponse(
        converged=report.converged,
        iterations=report.iterations,
        rounds=report.total_rounds,
        final_grad_norm=report.trace[-1].grad_norm,
        method=report.method_label,
        step=report.step_label,
        centralized=report.centralized,
        backtrack_warnings=report.backtrack_warnings,
        per_phase_rounds=dict(report.ledger.per_phase),
        scalars_sent=report.ledger.scalars_sent,
        final_lambda=[float(v) for v in report.final_lambda],
        trace_csv=trace_to_csv(report) if request.include_trace else None,
    )


def _row_model(row: SummaryRow) -> SummaryRowModel:
    return SummaryRowModel(
        n=row.n,
        E=row.E,
        method=row.method,
        min_rounds=row.min_rounds,
        mean_rounds=row.mean_rounds,
        max_rounds=row.max_rounds,
        median_rounds=row.median_rounds,
        converged_frac=row.converged_frac,
    )


def run_experiment_suite(request: SuiteRequest) -> SuiteResponse:
    config = parse_suite_config(request.config_text)
    rows = run_suite(config, request.out_dir)
    trace_files = len(config.sizes) * config.trials * len(config.methods)
    return SuiteResponse(
        out_dir=request.out_dir,
        trace_files=trace_files,
        summary=[_row_model(r) for r in rows],
    )


def summarize_traces(request: SummarizeRequest) -> SummarizeResponse:
    rows = summarize(request.trace_dir)
    return SummarizeResponse(
        summary=[_row_model(r) for r in rows],
        csv=summary_to_csv(rows),
    )
