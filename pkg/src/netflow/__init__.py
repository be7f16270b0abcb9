"""Distributed dual-descent solvers for network flow.

Core pieces: directed graphs with incidence algebra (:mod:`netflow.graph`),
the edge-separable dual calculus (:mod:`netflow.flow`), interchangeable
descent directions including the truncated-series approximate Newton
family (:mod:`netflow.directions`), an inexact consensus-based line search
(:mod:`netflow.linesearch`), a communication-metering synchronous
simulator (:mod:`netflow.simulator`), and an experiment suite runner
(:mod:`netflow.experiments`). A FastAPI service (:mod:`netflow.service`)
exposes the same operations over HTTP; the ``netflow`` CLI is a thin
client of that service layer.
"""

from .directions import (
    AddN,
    ConsensusNewton,
    DirectionMethod,
    ExactNewton,
    Gradient,
    NewtonDiagnostics,
    add_direction,
    consensus_newton_direction,
    exact_newton_direction,
    gradient_direction,
    newton_error,
    projected_spd_check,
)
from .flow import (
    DualState,
    EdgeCost,
    FlowProblem,
    dual_gradient,
    dual_hessian_split,
    dual_state,
    dual_value,
    make_problem,
    place_source_sink,
    primal_from_dual,
    primal_metrics,
    read_problem,
    uniform_costs,
    write_problem,
)
from .graph import (
    DirectedGraph,
    GraphMetrics,
    build_graph,
    incidence_matrix,
    metrics,
    random_connected_graph,
    read_graph,
    write_graph,
)
from .linesearch import (
    Backtracking,
    FixedStep,
    LineSearchConfig,
    StepRule,
    approx_norm,
    backtracking_stepsize,
)
from .simulator import (
    ExchangeLedger,
    TrialReport,
    communication_cost,
    iterate_once,
    run_trial,
    safe_gradient_step,
)

__version__ = "0.1.0"
