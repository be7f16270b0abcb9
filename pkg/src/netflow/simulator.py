"""Synchronous-round execution of a full dual-descent trial.

One "exchange round" is a synchronous step in which every node sends one
scalar per incident edge to each neighbor, so a round moves 2E scalars.
The per-iteration cost model:

- recovering primal flows needs the neighbors' potentials (1 round),
- assembling the gradient needs the neighbors' flows (1 round),
- a truncated-series direction of order N needs N further rounds,
- a consensus-Newton direction with m inner iterations needs m rounds,
- each backtracking trial point costs 2 rounds for its gradient plus the
  consensus rounds of its norm estimate; the initial norm estimate of a
  trial is charged once at the start since later iterations reuse the
  estimate computed at the accepted trial point.

The exact Newton direction requires global information, so its direction
phase has no finite round count; trials still run (2 local rounds per
iteration are metered) but the method is flagged centralized and excluded
from exchange-count comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .directions import (
    AddN,
    ConsensusNewton,
    DirectionMethod,
    ExactNewton,
    Gradient,
    add_direction,
    consensus_newton_direction,
    exact_newton_direction,
    gradient_direction,
)
from .errors import BacktrackExhausted
from .flow import DualState, FlowProblem, dual_state, dual_value
from .linesearch import Backtracking, FixedStep, StepRule, approx_norm, backtracking_stepsize

TRACE_HEADER = "iter,rounds,dual_value,primal_objective,feasibility,grad_norm,alpha"

PHASES = ("primal", "gradient", "direction", "linesearch")


@dataclass
class ExchangeLedger:
    """Running communication totals, broken down by iteration phase."""

    rounds: int = 0
    scalars_sent: int = 0
    per_phase: dict[str, int] = field(
        default_factory=lambda: {phase: 0 for phase in PHASES}
    )

    def charge(self, phase: str, rounds: int, scalars_per_round: int) -> None:
        self.rounds += rounds
        self.scalars_sent += rounds * scalars_per_round
        self.per_phase[phase] += rounds


@dataclass(frozen=True)
class TrialRecord:
    iteration: int
    rounds: int
    dual_value: float
    primal_objective: float
    feasibility: float
    grad_norm: float
    alpha: float


@dataclass
class TrialReport:
    trace: list[TrialRecord]
    converged: bool
    final_lambda: np.ndarray
    ledger: ExchangeLedger
    method_label: str
    step_label: str
    tol: float
    max_iters: int
    max_rounds: int
    centralized: bool = False
    backtrack_warnings: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return self.trace[-1].iteration

    @property
    def total_rounds(self) -> int:
        return self.trace[-1].rounds


def communication_cost(method: DirectionMethod, linesearch_rounds: int = 0) -> float:
    """Exchange rounds per iteration under the cost model above.

    Returns inf for the centralized exact-Newton direction. Any rounds
    spent on line search that iteration are passed in and added.
    """
    if isinstance(method, Gradient):
        base = 2.0
    elif isinstance(method, AddN):
        base = 2.0 + method.order
    elif isinstance(method, ConsensusNewton):
        base = 2.0 + method.rounds
    elif isinstance(method, ExactNewton):
        return math.inf
    else:
        raise TypeError(f"unknown direction method {method!r}")
    return base + linesearch_rounds


def compute_direction(method: DirectionMethod, state: DualState) -> np.ndarray:
    if isinstance(method, Gradient):
        return gradient_direction(state.g)
    if isinstance(method, AddN):
        return add_direction(method.order, state.hess_diag, state.hess_offdiag, state.g)
    if isinstance(method, ConsensusNewton):
        return consensus_newton_direction(
            method.rounds, state.hess_diag, state.hess_offdiag, state.g, method.splitting
        )
    if isinstance(method, ExactNewton):
        return exact_newton_direction(state.hess_diag, state.hess_offdiag, state.g)
    raise TypeError(f"unknown direction method {method!r}")


def _direction_rounds(method: DirectionMethod) -> int:
    if isinstance(method, AddN):
        return method.order
    if isinstance(method, ConsensusNewton):
        return method.rounds
    return 0  # gradient is part of the 2 base rounds; exact Newton is centralized


def iterate_once(
    problem: FlowProblem,
    state: DualState,
    method: DirectionMethod,
    step_rule: StepRule,
    ledger: ExchangeLedger,
) -> tuple[DualState, float, bool]:
    """One outer iteration: direction, step, update, and metering.

    Returns the new state, the step size taken, and whether the line
    search fell back after exhausting its backtrack budget. The Hessian
    splitting is recomputed at the new iterate (no stale reuse).
    """
    scalars = 2 * problem.num_edges
    d = compute_direction(method, state)
    ledger.charge("primal", 1, scalars)
    ledger.charge("gradient", 1, scalars)
    ledger.charge("direction", _direction_rounds(method), scalars)

    warned = False
    if isinstance(step_rule, FixedStep):
        alpha = step_rule.alpha
    else:
        cfg = step_rule.config
        eta_k, _ = approx_norm(problem.graph, state.g, cfg.consensus_rounds)
        try:
            alpha, _, exchanges = backtracking_stepsize(problem, state.lam, d, eta_k, cfg)
        except BacktrackExhausted as exc:
            alpha = exc.alpha_fallback
            exchanges = exc.exchanges_used
            warned = True
        ledger.charge("linesearch", exchanges, scalars)

    return dual_state(problem, state.lam + alpha * d), alpha, warned


def _record(state: DualState, problem: FlowProblem, iteration: int, rounds: int,
            alpha: float) -> TrialRecord:
    return TrialRecord(
        iteration=iteration,
        rounds=rounds,
        dual_value=dual_value(problem, state.lam),
        primal_objective=float(np.sum(problem.phi(state.x))),
        feasibility=float(np.linalg.norm(state.g)),
        grad_norm=float(np.linalg.norm(state.g)),
        alpha=alpha,
    )


def run_trial(
    problem: FlowProblem,
    method: DirectionMethod,
    step_rule: StepRule,
    tol: float = 1e-10,
    max_iters: int = 100_000,
    max_rounds: int = 10_000_000,
    meta: dict | None = None,
) -> TrialReport:
    """Iterate from lam = 0 until ||g|| <= tol or a cap trips.

    Caps produce converged=False rather than errors. Fully deterministic
    for fixed inputs.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    state = dual_state(problem, np.zeros(problem.n))
    ledger = ExchangeLedger()
    trace = [_record(state, problem, 0, 0, 0.0)]
    converged = float(np.linalg.norm(state.g)) <= tol
    warnings = 0

    if isinstance(step_rule, Backtracking) and not converged and max_iters > 0:
        # Startup cost of the very first norm estimate; see module docstring.
        ledger.charge(
            "linesearch", step_rule.config.consensus_rounds, 2 * problem.num_edges
        )

    iteration = 0
    while not converged and iteration < max_iters and ledger.rounds < max_rounds:
        state, alpha, warned = iterate_once(problem, state, method, step_rule, ledger)
        iteration += 1
        warnings += int(warned)
        trace.append(_record(state, problem, iteration, ledger.rounds, alpha))
        converged = float(np.linalg.norm(state.g)) <= tol

    return TrialReport(
        trace=trace,
        converged=converged,
        final_lambda=state.lam,
        ledger=ledger,
        method_label=method.label,
        step_label=step_rule.label,
        tol=tol,
        max_iters=max_iters,
        max_rounds=max_rounds,
        centralized=isinstance(method, ExactNewton),
        backtrack_warnings=warnings,
        meta=dict(meta or {}),
    )


def safe_gradient_step(problem: FlowProblem) -> float:
    """Largest step with a global descent guarantee for the gradient method.

    The dual Hessian is A W(lam) A^T with W bounded above edgewise by the
    coefficient (quadratic) or its reciprocal (cosh); 1 over the largest
    eigenvalue of the bounding Laplacian is returned.
    """
    w_sup = np.where(problem.quad_mask, problem.coeff, 1.0 / problem.coeff)
    bound = (problem.A * w_sup[None, :]) @ problem.A.T
    return 1.0 / float(np.linalg.eigvalsh(bound)[-1])


def trace_to_csv(report: TrialReport) -> str:
    """Serialize the per-iteration trace with the fixed column schema."""
    lines = [TRACE_HEADER]
    for r in report.trace:
        lines.append(
            f"{r.iteration},{r.rounds},{r.dual_value!r},{r.primal_objective!r},"
            f"{r.feasibility!r},{r.grad_norm!r},{r.alpha!r}"
        )
    return "\n".join(lines) + "\n"


def trace_from_csv(text: str) -> list[TrialRecord]:
    lines = text.strip().splitlines()
    if not lines or lines[0] != TRACE_HEADER:
        raise ValueError(f"bad trace header: {lines[0] if lines else '<empty>'!r}")
    records = []
    for line in lines[1:]:
        it, rounds, q, f, feas, gn, alpha = line.split(",")
        records.append(
            TrialRecord(int(it), int(rounds), float(q), float(f), float(feas),
                        float(gn), float(alpha))
        )
    return records


def write_trace(report: TrialReport, path: str | Path) -> None:
    Path(path).write_text(trace_to_csv(report))
